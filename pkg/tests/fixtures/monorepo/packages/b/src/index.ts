export interface Config {
  verbose: boolean;
}
