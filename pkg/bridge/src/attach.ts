/**
 * Deterministic head assignment over a POS-tagged token sequence.
 *
 * The tagger supplies words, lemmas, and coarse POS tags but no syntax,
 * so heads are assigned by positional rules. The rules aim for plausible
 * Universal Dependencies relations, but the hard guarantees are
 * structural: exactly one root, every head in range, no token heading
 * itself, and no cycles. Nominals, verbs, and auxiliaries only ever
 * attach to the root, and everything else attaches to a nominal, a verb,
 * or the root, so every head chain reaches the root in at most two
 * steps; a final repair pass re-attaches anything that still fails
 * (unreachable by construction, kept as insurance).
 */

export interface TaggedToken {
  form: string;
  lemma: string;
  upos: string;
}

export interface Attachment {
  head: number;
  deprel: string;
}

const NOMINAL = new Set(["NOUN", "PROPN", "PRON"]);

function firstIndex(tokens: TaggedToken[], wanted: Set<string>): number {
  for (let i = 0; i < tokens.length; i++) {
    if (wanted.has(tokens[i].upos)) return i;
  }
  return -1;
}

/** Index of the nearest token (either side) whose tag is in `wanted`; ties prefer the earlier one. */
function nearest(tokens: TaggedToken[], from: number, wanted: Set<string>): number {
  let best = -1;
  let bestDist = Infinity;
  for (let i = 0; i < tokens.length; i++) {
    if (i === from || !wanted.has(tokens[i].upos)) continue;
    const d = Math.abs(i - from);
    if (d < bestDist || (d === bestDist && i < best)) {
      best = i;
      bestDist = d;
    }
  }
  return best;
}

function nextOf(tokens: TaggedToken[], from: number, wanted: Set<string>): number {
  for (let i = from + 1; i < tokens.length; i++) {
    if (wanted.has(tokens[i].upos)) return i;
  }
  return -1;
}

function pickRoot(tokens: TaggedToken[]): number {
  const order: Set<string>[] = [
    new Set(["VERB"]),
    new Set(["AUX"]),
    new Set(["NOUN", "PROPN"]),
    new Set(["ADJ"]),
    new Set(["PRON"]),
  ];
  for (const wanted of order) {
    const i = firstIndex(tokens, wanted);
    if (i >= 0) return i;
  }
  for (let i = 0; i < tokens.length; i++) {
    if (tokens[i].upos !== "PUNCT") return i;
  }
  return 0;
}

export function attachHeads(tokens: TaggedToken[]): Attachment[] {
  const n = tokens.length;
  if (n === 0) return [];
  const root = pickRoot(tokens);
  const out: Attachment[] = new Array(n);
  out[root] = { head: 0, deprel: "root" };

  let sawObj = false;
  for (let i = 0; i < n; i++) {
    if (i === root) continue;
    const upos = tokens[i].upos;
    const toRoot = (deprel: string): Attachment => ({ head: root + 1, deprel });
    const toIdx = (idx: number, deprel: string): Attachment =>
      idx >= 0 && idx !== i ? { head: idx + 1, deprel } : toRoot("dep");

    let att: Attachment;
    switch (upos) {
      case "DET":
        att = toIdx(nextOf(tokens, i, NOMINAL), "det");
        break;
      case "ADJ":
        att = toIdx(nextOf(tokens, i, new Set(["NOUN", "PROPN"])), "amod");
        break;
      case "NUM":
        att = toIdx(nextOf(tokens, i, new Set(["NOUN", "PROPN"])), "nummod");
        break;
      case "ADP":
        att = toIdx(nextOf(tokens, i, NOMINAL), "case");
        break;
      case "AUX":
        att = toRoot("aux");
        break;
      case "NOUN":
      case "PROPN":
      case "PRON": {
        if (i < root) att = toRoot("nsubj");
        else if (!sawObj) {
          att = toRoot("obj");
          sawObj = true;
        } else att = toRoot("obl");
        break;
      }
      case "VERB":
        att = toRoot("conj");
        break;
      case "ADV":
        att = toIdx(nearest(tokens, i, new Set(["VERB", "AUX"])), "advmod");
        break;
      case "PART":
        if (tokens[i].lemma === "not") {
          att = toIdx(nearest(tokens, i, new Set(["VERB", "AUX"])), "advmod");
        } else {
          att = toIdx(nextOf(tokens, i, new Set(["VERB"])), "mark");
        }
        break;
      case "SCONJ":
        att = toIdx(nextOf(tokens, i, new Set(["VERB"])), "mark");
        break;
      case "CCONJ":
        att = toRoot("cc");
        break;
      case "INTJ":
        att = toRoot("discourse");
        break;
      case "PUNCT":
        att = toRoot("punct");
        break;
      default:
        att = toRoot("dep");
    }
    out[i] = att;
  }

  // Repair pass: any chain that fails to reach the root within n hops is
  // re-attached directly to it.
  for (let i = 0; i < n; i++) {
    let cur = i;
    let steps = 0;
    let broken = false;
    while (out[cur].head !== 0) {
      const next = out[cur].head - 1;
      if (next < 0 || next >= n || next === cur) {
        broken = true;
        break;
      }
      cur = next;
      steps += 1;
      if (steps > n) {
        broken = true;
        break;
      }
    }
    if (broken) out[i] = { head: root + 1, deprel: "dep" };
  }
  return out;
}
