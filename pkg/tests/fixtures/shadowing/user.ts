import { helper, Widget } from "./things";

export function shadow_local(x: string) {
  const helper = 1;
  return helper;
}

export function shadow_param(helper: number) {
  return helper + 1;
}

export function uses_import() {
  const w = new Widget();
  w.render();
  return helper();
}

export function block_scoped() {
  if (true) {
    const helper = 5;
  }
  return helper();
}
