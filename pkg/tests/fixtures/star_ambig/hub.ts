export * from "./alpha";
export * from "./beta";
