import { describe, expect, it } from "vitest";
import {
  ConlluDoc,
  docToConllu,
  sentenceToConllu,
  validateConllu,
} from "../src/conllu";

const doc: ConlluDoc = {
  id: "t1",
  sentences: [
    {
      id: "t1-s1",
      text: "Dogs sleep.",
      tokens: [
        { id: 1, form: "Dogs", lemma: "dog", upos: "NOUN", head: 2, deprel: "nsubj" },
        { id: 2, form: "sleep", lemma: "sleep", upos: "VERB", head: 0, deprel: "root" },
        { id: 3, form: ".", lemma: ".", upos: "PUNCT", head: 2, deprel: "punct" },
      ],
    },
    {
      id: "t1-s2",
      text: "Yes.",
      tokens: [
        { id: 1, form: "Yes", lemma: "yes", upos: "INTJ", head: 0, deprel: "root" },
        { id: 2, form: ".", lemma: ".", upos: "PUNCT", head: 1, deprel: "punct" },
      ],
    },
  ],
};

describe("sentenceToConllu", () => {
  it("emits sent_id, text, and ten tab-separated columns per token", () => {
    const block = sentenceToConllu(doc.sentences[0]);
    const lines = block.split("\n");
    expect(lines[0]).toBe("# sent_id = t1-s1");
    expect(lines[1]).toBe("# text = Dogs sleep.");
    expect(lines.length).toBe(5);
    for (const line of lines.slice(2)) {
      expect(line.split("\t").length).toBe(10);
    }
    expect(lines[2]).toBe("1\tDogs\tdog\tNOUN\t_\t_\t2\tnsubj\t_\t_");
  });

  it("writes the MISC column when a token carries one", () => {
    const block = sentenceToConllu({
      id: "s",
      text: "the",
      tokens: [
        { id: 1, form: "the", lemma: "the", upos: "DET", head: 0, deprel: "root", misc: "Stopword=Yes" },
      ],
    });
    expect(block.endsWith("1\tthe\tthe\tDET\t_\t_\t0\troot\t_\tStopword=Yes")).toBe(true);
  });

  it("never lets embedded tabs or newlines break the framing", () => {
    const block = sentenceToConllu({
      id: "s",
      text: "a\tb\nc",
      tokens: [
        { id: 1, form: "a\tb", lemma: "a\nb", upos: "X", head: 0, deprel: "root" },
      ],
    });
    for (const line of block.split("\n")) {
      expect(line.split("\t").length === 10 || line.startsWith("#")).toBe(true);
    }
  });
});

describe("docToConllu", () => {
  it("starts with newdoc id and separates sentences with one blank line", () => {
    const text = docToConllu(doc);
    expect(text.startsWith("# newdoc id = t1\n# sent_id = t1-s1\n")).toBe(true);
    const blocks = text.trimEnd().split("\n\n");
    expect(blocks.length).toBe(2);
    expect(blocks[1].startsWith("# sent_id = t1-s2")).toBe(true);
    expect(text.endsWith("\n\n")).toBe(true);
  });
});

describe("validateConllu", () => {
  it("accepts a well-formed document", () => {
    const report = validateConllu(docToConllu(doc));
    expect(report.errors).toEqual([]);
    expect(report.sentences).toBe(2);
    expect(report.tokens).toBe(5);
  });

  it("flags a sentence with no root", () => {
    const bad = "1\ta\ta\tX\t_\t_\t2\tdep\t_\t_\n2\tb\tb\tX\t_\t_\t1\tdep\t_\t_\n";
    const report = validateConllu(bad);
    expect(report.errors.some((e) => e.includes("0 root(s)"))).toBe(true);
  });

  it("flags two roots", () => {
    const bad = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n2\tb\tb\tX\t_\t_\t0\troot\t_\t_\n";
    const report = validateConllu(bad);
    expect(report.errors.some((e) => e.includes("2 root(s)"))).toBe(true);
  });

  it("flags a self-heading token", () => {
    const bad = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n2\tb\tb\tX\t_\t_\t2\tdep\t_\t_\n";
    const report = validateConllu(bad);
    expect(report.errors.some((e) => e.includes("heads itself"))).toBe(true);
  });

  it("flags a dangling head reference", () => {
    const bad = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n2\tb\tb\tX\t_\t_\t9\tdep\t_\t_\n";
    const report = validateConllu(bad);
    expect(report.errors.some((e) => e.includes("missing token 9"))).toBe(true);
  });

  it("flags a head cycle that bypasses the root", () => {
    const bad = [
      "1\ta\ta\tX\t_\t_\t0\troot\t_\t_",
      "2\tb\tb\tX\t_\t_\t3\tdep\t_\t_",
      "3\tc\tc\tX\t_\t_\t2\tdep\t_\t_",
      "",
    ].join("\n");
    const report = validateConllu(bad);
    expect(report.errors.some((e) => e.includes("cycle"))).toBe(true);
  });

  it("flags a line with the wrong number of fields", () => {
    const report = validateConllu("1\ta\ta\tX\t0\troot\n");
    expect(report.errors.some((e) => e.includes("10 fields"))).toBe(true);
  });

  it("flags non-contiguous token ids", () => {
    const bad = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n3\tb\tb\tX\t_\t_\t1\tdep\t_\t_\n";
    const report = validateConllu(bad);
    expect(report.errors.some((e) => e.includes("not contiguous"))).toBe(true);
  });
});
