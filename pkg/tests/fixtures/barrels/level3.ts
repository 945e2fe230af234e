export { calc as calculate } from "./level2";
export * from "./level2";
