import fs from "node:fs";
import path from "node:path";

export interface JsonlLine {
  lineno: number;
  text: string;
  row: unknown;
}

/** Reads a JSONL file; blank lines are skipped, bad JSON names the line. */
export function readJsonl(file: string): JsonlLine[] {
  const out: JsonlLine[] = [];
  const lines = fs.readFileSync(file, "utf8").split("\n");
  lines.forEach((text, i) => {
    if (!text.trim()) return;
    let row: unknown;
    try {
      row = JSON.parse(text);
    } catch (err) {
      throw new Error(`${file}:${i + 1}: invalid JSON: ${(err as Error).message}`);
    }
    out.push({ lineno: i + 1, text, row });
  });
  return out;
}

/** Writes pre-serialized lines atomically (temp file + rename). */
export function writeJsonlAtomic(file: string, lines: string[]): void {
  fs.mkdirSync(path.dirname(path.resolve(file)), { recursive: true });
  const tmp = `${file}.tmp-${process.pid}`;
  fs.writeFileSync(tmp, lines.map((line) => line + "\n").join(""), "utf8");
  fs.renameSync(tmp, file);
}
