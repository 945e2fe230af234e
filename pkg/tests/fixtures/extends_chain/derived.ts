import { Base } from "./base";
export class Derived extends Base {
  extra() { return 1; }
}
class SameFileBase {
  ping() { return "p"; }
}
export class SameFileChild extends SameFileBase {
}
