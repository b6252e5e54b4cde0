#!/usr/bin/env node
/**
 * parse-bridge: convert raw transcript text files to CoNLL-U.
 *
 * Usage:
 *   parse-bridge --in 'transcripts/*.txt' --out corpus/ [--model NAME]
 *                [--lang en] [--mark-stopwords]
 *
 * Exit codes: 0 success (skipped empty files included), 1 runtime
 * failure (model load, I/O, contract violation), 2 usage error.
 */

import { parseArgs } from "node:util";
import { BridgeConfig, DEFAULT_MODEL, runBridge } from "./bridge";
import { BridgeError } from "./errors";

const USAGE = `usage: parse-bridge --in GLOB --out DIR [--model NAME] [--lang CODE] [--mark-stopwords]

  --in GLOB         glob matching input text files, one transcript per file
                    (quote it so the shell does not expand it)
  --out DIR         directory for the emitted .conllu files
  --model NAME      wink-nlp model package (default: ${DEFAULT_MODEL})
  --lang CODE       language code; only 'en' is supported (default: en)
  --mark-stopwords  annotate stopword tokens with Stopword=Yes in MISC
  -h, --help        show this message
`;

export function parseCliArgs(argv: string[]): BridgeConfig | "help" {
  const parsed = parseArgs({
    args: argv,
    options: {
      in: { type: "string" },
      out: { type: "string" },
      model: { type: "string", default: DEFAULT_MODEL },
      lang: { type: "string", default: "en" },
      "mark-stopwords": { type: "boolean", default: false },
      help: { type: "boolean", short: "h", default: false },
    },
    allowPositionals: false,
  });
  if (parsed.values.help) return "help";
  const missing = ["in", "out"].filter((k) => !parsed.values[k as "in" | "out"]);
  if (missing.length > 0) {
    throw new BridgeError(`missing required ${missing.map((m) => `--${m}`).join(", ")}`);
  }
  return {
    inGlob: parsed.values.in!,
    outDir: parsed.values.out!,
    model: parsed.values.model!,
    lang: parsed.values.lang!,
    markStopwords: parsed.values["mark-stopwords"]!,
  };
}

export async function main(argv: string[]): Promise<number> {
  let config: BridgeConfig | "help";
  try {
    config = parseCliArgs(argv);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n${USAGE}`);
    return 2;
  }
  if (config === "help") {
    process.stdout.write(USAGE);
    return 0;
  }
  try {
    await runBridge(config, {
      warn: (m) => process.stderr.write(`warning: ${m}\n`),
      info: (m) => process.stdout.write(`${m}\n`),
    });
    return 0;
  } catch (err) {
    if (err instanceof BridgeError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  main(process.argv.slice(2)).then(
    (code) => process.exit(code),
    (err) => {
      console.error(err);
      process.exit(1);
    },
  );
}
