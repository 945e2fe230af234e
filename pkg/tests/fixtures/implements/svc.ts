import { Api, Closeable } from "./api";
export class Svc implements Api, Closeable {
  run(input: string) { return input; }
  close() {}
}
