/**
 * CoNLL-U document model and serializer.
 *
 * Emits standard 10-column CoNLL-U with `# newdoc id`, `# sent_id`, and
 * `# text` comments. Columns the bridge does not populate (XPOS, FEATS,
 * DEPS) are written as "_".
 */

export interface Token {
  /** 1-based position within the sentence. */
  id: number;
  form: string;
  lemma: string;
  upos: string;
  /** 0 for the sentence root, otherwise the id of the governing token. */
  head: number;
  deprel: string;
  /** MISC column payload, e.g. "Stopword=Yes"; omitted -> "_". */
  misc?: string;
}

export interface Sentence {
  id: string;
  text: string;
  tokens: Token[];
}

export interface ConlluDoc {
  id: string;
  sentences: Sentence[];
}

/** Collapse whitespace that would corrupt the tab/newline framing. */
function clean(value: string, fallback = "_"): string {
  const v = value.replace(/[\t\r\n]+/g, " ").trim();
  return v.length > 0 ? v : fallback;
}

export function sentenceToConllu(sentence: Sentence): string {
  const lines: string[] = [];
  lines.push(`# sent_id = ${clean(sentence.id)}`);
  lines.push(`# text = ${clean(sentence.text)}`);
  for (const t of sentence.tokens) {
    lines.push(
      [
        String(t.id),
        clean(t.form),
        clean(t.lemma),
        clean(t.upos, "X"),
        "_",
        "_",
        String(t.head),
        clean(t.deprel, "dep"),
        "_",
        t.misc ? clean(t.misc) : "_",
      ].join("\t"),
    );
  }
  return lines.join("\n");
}

export function docToConllu(doc: ConlluDoc): string {
  // One blank line terminates each sentence block, as the format requires.
  const blocks = doc.sentences.map(sentenceToConllu);
  return `# newdoc id = ${clean(doc.id)}\n` + blocks.join("\n\n") + "\n\n";
}

export interface ValidationReport {
  sentences: number;
  tokens: number;
  errors: string[];
}

/**
 * Structural check over serialized CoNLL-U: every token line has ten
 * tab-separated fields, ids run 1..n, exactly one token has HEAD=0,
 * every other head references an existing id (never itself), and each
 * head chain terminates at the root.
 */
export function validateConllu(text: string): ValidationReport {
  const errors: string[] = [];
  let sentences = 0;
  let tokens = 0;
  let block: string[] = [];
  let sentId = "?";

  const checkBlock = () => {
    if (block.length === 0) return;
    sentences += 1;
    const errorsBefore = errors.length;
    const ids: number[] = [];
    const heads = new Map<number, number>();
    for (const line of block) {
      const fields = line.split("\t");
      if (fields.length !== 10) {
        errors.push(`${sentId}: expected 10 fields, got ${fields.length}`);
        block = [];
        return;
      }
      const id = Number(fields[0]);
      const head = Number(fields[6]);
      ids.push(id);
      heads.set(id, head);
    }
    tokens += ids.length;
    for (let i = 0; i < ids.length; i++) {
      if (ids[i] !== i + 1) {
        errors.push(`${sentId}: token ids not contiguous from 1`);
        break;
      }
    }
    const roots = ids.filter((id) => heads.get(id) === 0);
    if (roots.length !== 1) {
      errors.push(`${sentId}: ${roots.length} root(s), expected exactly 1`);
    }
    for (const id of ids) {
      const head = heads.get(id)!;
      if (head === id) errors.push(`${sentId}: token ${id} heads itself`);
      else if (head !== 0 && !heads.has(head)) {
        errors.push(`${sentId}: token ${id} heads missing token ${head}`);
      }
    }
    if (roots.length === 1 && errors.length === errorsBefore) {
      for (const id of ids) {
        let cur = id;
        let steps = 0;
        while (heads.get(cur) !== 0) {
          cur = heads.get(cur)!;
          steps += 1;
          if (steps > ids.length) {
            errors.push(`${sentId}: head cycle at token ${id}`);
            break;
          }
        }
      }
    }
    block = [];
  };

  for (const raw of text.split("\n")) {
    const line = raw.trimEnd();
    if (line === "") {
      checkBlock();
      continue;
    }
    if (line.startsWith("#")) {
      const m = line.match(/^#\s*sent_id\s*=\s*(.*)$/);
      if (m) sentId = m[1];
      continue;
    }
    block.push(line);
  }
  checkBlock();
  return { sentences, tokens, errors };
}
