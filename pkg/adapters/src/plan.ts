import { readJsonl } from "./jsonl.js";
import { planRowSchema } from "./schemas.js";

/** The span fields of one window, both parsed and as raw JSON tokens. */
export interface PlanWindow {
  windowStart: number;
  windowEnd: number;
  coreStart: number;
  coreEnd: number;
  /** The exact number tokens from the plan file, for byte-identical echo. */
  raw: { windowStart: string; windowEnd: string; coreStart: string; coreEnd: string };
}

export interface PlanRow {
  sampleId: string;
  audioUri: string;
  windows: PlanWindow[];
}

const WINDOW_TOKENS =
  /\{"window_start_s": ([^,]+), "window_end_s": ([^,]+), "core_start_s": ([^,]+), "core_end_s": ([^}]+)\}/g;

/**
 * Reads a window-plan JSONL file.
 *
 * Downstream files must repeat the plan's spans byte-for-byte, so besides
 * parsing each line this keeps the literal number tokens and checks that
 * they reparse to the parsed values.
 */
export function readPlan(file: string): PlanRow[] {
  const out: PlanRow[] = [];
  for (const { lineno, text, row } of readJsonl(file)) {
    const where = `${file}:${lineno}`;
    const parsed = planRowSchema.safeParse(row);
    if (!parsed.success) {
      throw new Error(`${where}: not a plan row: ${parsed.error.issues[0]?.message}`);
    }
    const tokens = [...text.matchAll(WINDOW_TOKENS)];
    if (tokens.length !== parsed.data.windows.length) {
      throw new Error(`${where}: found ${tokens.length} window literals for ${parsed.data.windows.length} windows`);
    }
    const windows = parsed.data.windows.map((w, i) => {
      const [, ws, we, cs, ce] = tokens[i];
      const raw = { windowStart: ws, windowEnd: we, coreStart: cs, coreEnd: ce };
      const pairs: [string, number][] = [
        [ws, w.window_start_s],
        [we, w.window_end_s],
        [cs, w.core_start_s],
        [ce, w.core_end_s],
      ];
      for (const [token, value] of pairs) {
        if (Number(token) !== value) {
          throw new Error(`${where}: window ${i}: token ${token} does not reparse to ${value}`);
        }
      }
      return {
        windowStart: w.window_start_s,
        windowEnd: w.window_end_s,
        coreStart: w.core_start_s,
        coreEnd: w.core_end_s,
        raw,
      };
    });
    out.push({ sampleId: parsed.data.sample_id, audioUri: parsed.data.audio_uri, windows });
  }
  return out;
}
