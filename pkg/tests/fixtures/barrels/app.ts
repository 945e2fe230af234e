import { calculate, Engine } from "./level3";
export function run() {
  const engine = new Engine();
  engine.start();
  return calculate(21);
}
