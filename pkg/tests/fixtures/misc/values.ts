export enum Color {
  Red,
  Green = 2,
}
export const A = 1, B = 2, C = 3;
export default function main_thing() {
  return A + B;
}
export type Alias = Color | null;
