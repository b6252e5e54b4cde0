/** Error with a message meant for the CLI user rather than a stack trace. */
export class BridgeError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "BridgeError";
  }
}
