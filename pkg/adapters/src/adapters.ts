import type { InferenceBackend } from "./backends.js";
import { readJsonl } from "./jsonl.js";
import type { PlanRow, PlanWindow } from "./plan.js";
import { EMOTIONS, audioRowSchema, type Emotion } from "./schemas.js";

export interface AudioRow {
  sampleId: string;
  audioUri: string;
  durationS: number;
}

export function readAudioManifest(file: string): AudioRow[] {
  return readJsonl(file).map(({ lineno, row }) => {
    const parsed = audioRowSchema.safeParse(row);
    if (!parsed.success) {
      throw new Error(`${file}:${lineno}: not an audio row: ${parsed.error.issues[0]?.message}`);
    }
    return {
      sampleId: parsed.data.sample_id,
      audioUri: parsed.data.audio_uri,
      durationS: parsed.data.duration_s,
    };
  });
}

export interface AdapterResult {
  /** Serialized JSONL lines, span tokens copied verbatim from the plan. */
  lines: string[];
  failures: { sampleId: string; error: string }[];
}

const S = JSON.stringify;

// Span fields are spliced in as the plan's original tokens, not reserialized
// numbers, so the bytes match the plan exactly.
function spanFields(win: PlanWindow): string {
  return (
    `"core_start_s":${win.raw.coreStart},"core_end_s":${win.raw.coreEnd},` +
    `"window_start_s":${win.raw.windowStart},"window_end_s":${win.raw.windowEnd}`
  );
}

function posteriorJson(posterior: Record<Emotion, number>): string {
  const body = EMOTIONS.map((cat) => `${S(cat)}:${S(posterior[cat])}`).join(",");
  return `{${body}}`;
}

// One inference failure skips that sample and the batch continues; only a
// batch with zero surviving samples is an error.
async function collect<T extends { sampleId: string }>(
  rows: T[],
  fn: (row: T) => Promise<string[]>,
): Promise<AdapterResult> {
  const lines: string[] = [];
  const failures: { sampleId: string; error: string }[] = [];
  for (const row of rows) {
    try {
      lines.push(...(await fn(row)));
    } catch (err) {
      failures.push({ sampleId: row.sampleId, error: (err as Error).message });
    }
  }
  if (rows.length > 0 && lines.length === 0) {
    throw new Error(`every sample failed; first: ${failures[0]?.sampleId}: ${failures[0]?.error}`);
  }
  return { lines, failures };
}

/** Scores every window with every categorical model; one fragment per pair. */
export function runCategorical(
  plan: PlanRow[],
  backend: InferenceBackend,
  models: string[],
): Promise<AdapterResult> {
  if (models.length === 0) throw new Error("need at least one categorical model");
  return collect(plan, async (row) => {
    const lines: string[] = [];
    for (const model of models) {
      for (const win of row.windows) {
        const posterior = await backend.posterior(model, row.sampleId, row.audioUri, win);
        lines.push(
          `{"sample_id":${S(row.sampleId)},"model_id":${S(model)},${spanFields(win)},` +
            `"posterior":${posteriorJson(posterior)}}`,
        );
      }
    }
    return lines;
  });
}

export function runDimensional(
  plan: PlanRow[],
  backend: InferenceBackend,
  model: string,
): Promise<AdapterResult> {
  return collect(plan, async (row) => {
    const lines: string[] = [];
    for (const win of row.windows) {
      const d = await backend.dimensions(model, row.sampleId, row.audioUri, win);
      lines.push(
        `{"sample_id":${S(row.sampleId)},${spanFields(win)},` +
          `"valence":${S(d.valence)},"arousal":${S(d.arousal)},"dominance":${S(d.dominance)}}`,
      );
    }
    return lines;
  });
}

export function runGender(
  plan: PlanRow[],
  backend: InferenceBackend,
  model: string,
): Promise<AdapterResult> {
  return collect(plan, async (row) => {
    const lines: string[] = [];
    for (const win of row.windows) {
      const g = await backend.gender(model, row.sampleId, row.audioUri, win);
      lines.push(
        `{"sample_id":${S(row.sampleId)},"core_start_s":${win.raw.coreStart},` +
          `"core_end_s":${win.raw.coreEnd},"gender":${S(g.gender)},"confidence":${S(g.confidence)}}`,
      );
    }
    return lines;
  });
}

export function runAsr(
  audio: AudioRow[],
  backend: InferenceBackend,
  model: string,
): Promise<AdapterResult> {
  return collect(audio, async (row) => {
    const words = await backend.words(model, row.sampleId, row.audioUri, row.durationS);
    const rendered = words
      .map((w) => `{"text":${S(w.text)},"start_s":${S(w.startS)},"end_s":${S(w.endS)}}`)
      .join(",");
    const utterance = words.map((w) => w.text).join(" ");
    return [`{"sample_id":${S(row.sampleId)},"utterance":${S(utterance)},"words":[${rendered}]}`];
  });
}

export function runVad(
  audio: AudioRow[],
  backend: InferenceBackend,
  model: string,
): Promise<AdapterResult> {
  return collect(audio, async (row) => {
    const spans = await backend.voicedSpans(model, row.sampleId, row.audioUri, row.durationS);
    const rendered = spans.map((s) => `{"start_s":${S(s.startS)},"end_s":${S(s.endS)}}`).join(",");
    return [
      `{"sample_id":${S(row.sampleId)},"audio_uri":${S(row.audioUri)},"spans":[${rendered}]}`,
    ];
  });
}
