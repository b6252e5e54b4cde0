import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { runBridge } from "../src/bridge";
import { validateConllu } from "../src/conllu";
import { BridgeError } from "../src/errors";

const PROSE = path.join(__dirname, "fixtures", "prose");
const quiet = { warn: () => {}, info: () => {} };

let workDir: string;

beforeAll(() => {
  workDir = fs.mkdtempSync(path.join(os.tmpdir(), "bridge-"));
});

afterAll(() => {
  fs.rmSync(workDir, { recursive: true, force: true });
});

describe("runBridge on the prose fixtures", () => {
  it("writes one structurally valid CoNLL-U file per transcript", async () => {
    const outDir = path.join(workDir, "out1");
    const summary = await runBridge({
      inGlob: path.join(PROSE, "*.txt"),
      outDir,
      model: "wink-eng-lite-web-model",
      lang: "en",
      markStopwords: false,
    }, quiet);

    expect(summary.matched.length).toBe(10);
    expect(summary.written.length).toBe(10);
    expect(summary.skipped).toEqual([]);
    expect(summary.sentences).toBeGreaterThanOrEqual(40);

    for (let i = 1; i <= 10; i++) {
      const name = `story${String(i).padStart(2, "0")}`;
      const file = path.join(outDir, `${name}.conllu`);
      const text = fs.readFileSync(file, "utf-8");
      expect(text.startsWith(`# newdoc id = ${name}\n`)).toBe(true);
      const report = validateConllu(text);
      expect(report.errors).toEqual([]);
      expect(report.sentences).toBeGreaterThanOrEqual(2);
      // every token line: exactly one HEAD=0 per sentence is already part
      // of validateConllu; spot-check the column shape too
      for (const line of text.split("\n")) {
        if (line === "" || line.startsWith("#")) continue;
        expect(line.split("\t").length).toBe(10);
      }
    }
  });

  it("is byte-identical across runs", async () => {
    const outA = path.join(workDir, "detA");
    const outB = path.join(workDir, "detB");
    for (const outDir of [outA, outB]) {
      await runBridge({
        inGlob: path.join(PROSE, "*.txt"),
        outDir,
        model: "wink-eng-lite-web-model",
        lang: "en",
        markStopwords: false,
      }, quiet);
    }
    for (const name of fs.readdirSync(outA)) {
      const a = fs.readFileSync(path.join(outA, name), "utf-8");
      const b = fs.readFileSync(path.join(outB, name), "utf-8");
      expect(a).toBe(b);
    }
  });

  it("skips empty files with a warning but still succeeds", async () => {
    const inDir = path.join(workDir, "with-empty");
    const outDir = path.join(workDir, "out2");
    fs.mkdirSync(inDir, { recursive: true });
    fs.copyFileSync(path.join(PROSE, "story01.txt"), path.join(inDir, "keep.txt"));
    fs.writeFileSync(path.join(inDir, "blank.txt"), "   \n\n  ", "utf-8");

    const warnings: string[] = [];
    const summary = await runBridge({
      inGlob: path.join(inDir, "*.txt"),
      outDir,
      model: "wink-eng-lite-web-model",
      lang: "en",
      markStopwords: false,
    }, { warn: (m) => warnings.push(m), info: () => {} });

    expect(summary.written.length).toBe(1);
    expect(summary.skipped.length).toBe(1);
    expect(warnings.some((w) => w.includes("blank.txt"))).toBe(true);
    expect(fs.existsSync(path.join(outDir, "blank.conllu"))).toBe(false);
    expect(fs.existsSync(path.join(outDir, "keep.conllu"))).toBe(true);
  });

  it("marks stopwords in MISC when asked", async () => {
    const outDir = path.join(workDir, "out3");
    await runBridge({
      inGlob: path.join(PROSE, "story01.txt"),
      outDir,
      model: "wink-eng-lite-web-model",
      lang: "en",
      markStopwords: true,
    }, quiet);
    const text = fs.readFileSync(path.join(outDir, "story01.conllu"), "utf-8");
    const marked = text
      .split("\n")
      .filter((l) => l.length > 0 && !l.startsWith("#"))
      .filter((l) => l.split("\t")[9] === "Stopword=Yes");
    expect(marked.length).toBeGreaterThan(0);
    expect(marked.some((l) => l.split("\t")[2] === "the")).toBe(true);
    expect(validateConllu(text).errors).toEqual([]);
  });

  it("rejects a glob that matches nothing", async () => {
    await expect(
      runBridge({
        inGlob: path.join(PROSE, "*.nope"),
        outDir: path.join(workDir, "out4"),
        model: "wink-eng-lite-web-model",
        lang: "en",
        markStopwords: false,
      }, quiet),
    ).rejects.toThrow(BridgeError);
  });

  it("rejects colliding transcript ids", async () => {
    const inDir = path.join(workDir, "clash");
    fs.mkdirSync(inDir, { recursive: true });
    fs.writeFileSync(path.join(inDir, "same.txt"), "One sentence here.", "utf-8");
    fs.writeFileSync(path.join(inDir, "same.text"), "Another sentence here.", "utf-8");
    await expect(
      runBridge({
        inGlob: path.join(inDir, "same.*"),
        outDir: path.join(workDir, "out5"),
        model: "wink-eng-lite-web-model",
        lang: "en",
        markStopwords: false,
      }, quiet),
    ).rejects.toThrow(/same/);
  });

  it("rejects unsupported languages", async () => {
    await expect(
      runBridge({
        inGlob: path.join(PROSE, "*.txt"),
        outDir: path.join(workDir, "out6"),
        model: "wink-eng-lite-web-model",
        lang: "it",
        markStopwords: false,
      }, quiet),
    ).rejects.toThrow(/only 'en'/);
  });

  it("reports a missing model with install instructions", async () => {
    await expect(
      runBridge({
        inGlob: path.join(PROSE, "*.txt"),
        outDir: path.join(workDir, "out7"),
        model: "wink-no-such-model",
        lang: "en",
        markStopwords: false,
      }, quiet),
    ).rejects.toThrow(/npm install wink-no-such-model/);
  });
});
