export function compute(n: number) {
  return n * 2;
}
export class Engine {
  start() { return compute(1); }
}
