import { Repo } from "./index";
export function loadUser(id: string) {
  const repo = new Repo();
  return repo.getById(id);
}
