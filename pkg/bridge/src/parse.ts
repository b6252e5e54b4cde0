/**
 * Text -> tagged sentences via a pretrained wink-nlp language model,
 * then head assignment and CoNLL-U document construction.
 */

import winkNLP, { ItemSentence, ItemToken, ItsFunction, WinkMethods } from "wink-nlp";
import { attachHeads, TaggedToken } from "./attach";
import { ConlluDoc, Sentence, Token } from "./conllu";
import { BridgeError } from "./errors";

export interface ParserHandle {
  nlp: WinkMethods;
  modelName: string;
}

/**
 * Load a wink-nlp model package by name. The model must be installed
 * next to the bridge (it is an ordinary npm dependency).
 */
export function loadParser(modelName: string): ParserHandle {
  let model: unknown;
  try {
    // eslint-disable-next-line @typescript-eslint/no-var-requires
    model = require(modelName);
  } catch (err) {
    throw new BridgeError(
      `cannot load parser model '${modelName}': ${(err as Error).message}\n` +
        `install it with: npm install ${modelName}`,
    );
  }
  try {
    const nlp = winkNLP(model as Parameters<typeof winkNLP>[0]);
    return { nlp, modelName };
  } catch (err) {
    throw new BridgeError(
      `'${modelName}' is not a usable wink-nlp model: ${(err as Error).message}`,
    );
  }
}

export interface ParseOptions {
  /** Mark stopword tokens with "Stopword=Yes" in the MISC column. */
  markStopwords?: boolean;
}

/**
 * Parse one transcript's raw text into a CoNLL-U document. Sentences
 * that tokenize to nothing (blank lines, stray whitespace) are dropped.
 */
export function parseTextToDoc(
  handle: ParserHandle,
  transcriptId: string,
  text: string,
  options: ParseOptions = {},
): ConlluDoc {
  const { nlp } = handle;
  const its = nlp.its;
  // wink-nlp 2.4.0 declares its.lemma with a parameter list that does not
  // satisfy its own ItsFunction type; the runtime accepts it unchanged.
  const lemmaOf = its.lemma as unknown as ItsFunction<string>;
  const doc = nlp.readDoc(text);
  const sentences: Sentence[] = [];

  doc.sentences().each((sent: ItemSentence) => {
    const tagged: TaggedToken[] = [];
    const stopFlags: boolean[] = [];
    sent.tokens().each((tok: ItemToken) => {
      const form = String(tok.out(its.value));
      if (form.trim().length === 0) return;
      const lemma = String(tok.out(lemmaOf) || form).toLowerCase();
      const upos = String(tok.out(its.pos) || "X");
      tagged.push({ form, lemma, upos });
      stopFlags.push(Boolean(tok.out(its.stopWordFlag)));
    });
    if (tagged.length === 0) return;

    const attachments = attachHeads(tagged);
    const tokens: Token[] = tagged.map((t, i) => ({
      id: i + 1,
      form: t.form,
      lemma: t.lemma,
      upos: t.upos,
      head: attachments[i].head,
      deprel: attachments[i].deprel,
      misc: options.markStopwords && stopFlags[i] ? "Stopword=Yes" : undefined,
    }));
    sentences.push({
      id: `${transcriptId}-s${sentences.length + 1}`,
      text: String(sent.out(its.value)),
      tokens,
    });
  });

  return { id: transcriptId, sentences };
}
