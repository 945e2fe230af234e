export { UserRepo as Repo } from "./user-repo";
