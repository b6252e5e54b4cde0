/**
 * The bridge run: expand the input glob, parse each transcript file, and
 * write one CoNLL-U file per transcript into the output directory.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { glob } from "glob";
import { docToConllu, validateConllu } from "./conllu";
import { BridgeError } from "./errors";
import { loadParser, parseTextToDoc, ParserHandle } from "./parse";

export interface BridgeConfig {
  /** Glob matching the input text files, one transcript per file. */
  inGlob: string;
  outDir: string;
  /** npm package name of the wink-nlp model to parse with. */
  model: string;
  /** ISO language code; only "en" is supported. */
  lang: string;
  markStopwords: boolean;
}

export interface BridgeSummary {
  matched: string[];
  written: string[];
  skipped: string[];
  sentences: number;
  tokens: number;
}

export interface BridgeLogger {
  warn(message: string): void;
  info(message: string): void;
}

export const DEFAULT_MODEL = "wink-eng-lite-web-model";

export function defaultConfig(inGlob: string, outDir: string): BridgeConfig {
  return { inGlob, outDir, model: DEFAULT_MODEL, lang: "en", markStopwords: false };
}

function transcriptIdOf(filePath: string): string {
  const base = path.basename(filePath);
  const dot = base.lastIndexOf(".");
  return dot > 0 ? base.slice(0, dot) : base;
}

export async function runBridge(
  config: BridgeConfig,
  logger: BridgeLogger = console,
  parser?: ParserHandle,
): Promise<BridgeSummary> {
  if (config.lang !== "en") {
    throw new BridgeError(`unsupported language '${config.lang}': only 'en' is supported`);
  }
  const matched = (await glob(config.inGlob, { nodir: true })).sort();
  if (matched.length === 0) {
    throw new BridgeError(`no files match '${config.inGlob}'`);
  }
  const ids = new Map<string, string>();
  for (const file of matched) {
    const id = transcriptIdOf(file);
    const clash = ids.get(id);
    if (clash !== undefined) {
      throw new BridgeError(
        `transcript id '${id}' is produced by both '${clash}' and '${file}'`,
      );
    }
    ids.set(id, file);
  }

  const handle = parser ?? loadParser(config.model);
  fs.mkdirSync(config.outDir, { recursive: true });

  const summary: BridgeSummary = {
    matched,
    written: [],
    skipped: [],
    sentences: 0,
    tokens: 0,
  };
  for (const file of matched) {
    const text = fs.readFileSync(file, "utf-8");
    const id = transcriptIdOf(file);
    if (text.trim().length === 0) {
      logger.warn(`skipping empty file: ${file}`);
      summary.skipped.push(file);
      continue;
    }
    const doc = parseTextToDoc(handle, id, text, {
      markStopwords: config.markStopwords,
    });
    if (doc.sentences.length === 0) {
      logger.warn(`skipping ${file}: no sentences survived tokenization`);
      summary.skipped.push(file);
      continue;
    }
    const conllu = docToConllu(doc);
    const report = validateConllu(conllu);
    if (report.errors.length > 0) {
      throw new BridgeError(
        `internal contract violation for ${file}: ${report.errors.join("; ")}`,
      );
    }
    const outPath = path.join(config.outDir, `${id}.conllu`);
    fs.writeFileSync(outPath, conllu, "utf-8");
    summary.written.push(outPath);
    summary.sentences += report.sentences;
    summary.tokens += report.tokens;
  }
  logger.info(
    `wrote ${summary.written.length} file(s), ` +
      `${summary.sentences} sentence(s), ${summary.tokens} token(s) -> ${config.outDir}`,
  );
  return summary;
}
