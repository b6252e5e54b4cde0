export { attachHeads, TaggedToken, Attachment } from "./attach";
export {
  Token,
  Sentence,
  ConlluDoc,
  sentenceToConllu,
  docToConllu,
  validateConllu,
  ValidationReport,
} from "./conllu";
export { BridgeError } from "./errors";
export { loadParser, parseTextToDoc, ParserHandle, ParseOptions } from "./parse";
export {
  BridgeConfig,
  BridgeSummary,
  BridgeLogger,
  DEFAULT_MODEL,
  defaultConfig,
  runBridge,
} from "./bridge";
