import { X } from "./a";
export function touch() {
  return X();
}
