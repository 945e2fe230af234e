export * from "./level1";
