import { z } from "zod";
import type { InferenceBackend } from "./backends.js";
import type { PlanWindow } from "./plan.js";
import { EMOTIONS, GENDERS } from "./schemas.js";

const posteriorResponse = z.object({ posterior: z.record(z.enum(EMOTIONS), z.number()) });
const dimensionsResponse = z.object({
  valence: z.number(),
  arousal: z.number(),
  dominance: z.number(),
});
const genderResponse = z.object({ gender: z.enum(GENDERS), confidence: z.number() });
const wordsResponse = z.object({
  words: z.array(z.object({ text: z.string(), start_s: z.number(), end_s: z.number() })),
});
const spansResponse = z.object({
  spans: z.array(z.object({ start_s: z.number(), end_s: z.number() })),
});

function windowPayload(win: PlanWindow) {
  return {
    window_start_s: win.windowStart,
    window_end_s: win.windowEnd,
    core_start_s: win.coreStart,
    core_end_s: win.coreEnd,
  };
}

export interface HttpBackendOptions {
  timeoutMs?: number;
  /** Name of the environment variable holding the bearer token, if any. */
  apiKeyEnv?: string;
}

/**
 * Talks to a model server exposing one POST route per task under a common
 * base URL: /posterior, /dimensions, /gender, /words, /voiced_spans.
 */
export class HttpBackend implements InferenceBackend {
  private readonly timeoutMs: number;
  private readonly apiKey: string | undefined;

  constructor(
    private readonly endpoint: string,
    options: HttpBackendOptions = {},
  ) {
    this.timeoutMs = options.timeoutMs ?? 120_000;
    this.apiKey = options.apiKeyEnv ? process.env[options.apiKeyEnv] : undefined;
  }

  private async post(task: string, payload: Record<string, unknown>): Promise<unknown> {
    const headers: Record<string, string> = { "content-type": "application/json" };
    if (this.apiKey) headers.authorization = `Bearer ${this.apiKey}`;
    const url = `${this.endpoint.replace(/\/$/, "")}/${task}`;
    const response = await fetch(url, {
      method: "POST",
      headers,
      body: JSON.stringify(payload),
      signal: AbortSignal.timeout(this.timeoutMs),
    });
    if (!response.ok) {
      throw new Error(`${url}: HTTP ${response.status}`);
    }
    return response.json();
  }

  async posterior(modelId: string, sampleId: string, audioUri: string, win: PlanWindow) {
    const body = await this.post("posterior", {
      model_id: modelId,
      sample_id: sampleId,
      audio_uri: audioUri,
      window: windowPayload(win),
    });
    return posteriorResponse.parse(body).posterior as Record<(typeof EMOTIONS)[number], number>;
  }

  async dimensions(modelId: string, sampleId: string, audioUri: string, win: PlanWindow) {
    const body = await this.post("dimensions", {
      model_id: modelId,
      sample_id: sampleId,
      audio_uri: audioUri,
      window: windowPayload(win),
    });
    return dimensionsResponse.parse(body);
  }

  async gender(modelId: string, sampleId: string, audioUri: string, win: PlanWindow) {
    const body = await this.post("gender", {
      model_id: modelId,
      sample_id: sampleId,
      audio_uri: audioUri,
      window: windowPayload(win),
    });
    return genderResponse.parse(body);
  }

  async words(modelId: string, sampleId: string, audioUri: string, durationS: number) {
    const body = await this.post("words", {
      model_id: modelId,
      sample_id: sampleId,
      audio_uri: audioUri,
      duration_s: durationS,
    });
    return wordsResponse.parse(body).words.map((w) => ({
      text: w.text,
      startS: w.start_s,
      endS: w.end_s,
    }));
  }

  async voicedSpans(modelId: string, sampleId: string, audioUri: string, durationS: number) {
    const body = await this.post("voiced_spans", {
      model_id: modelId,
      sample_id: sampleId,
      audio_uri: audioUri,
      duration_s: durationS,
    });
    return spansResponse.parse(body).spans.map((s) => ({ startS: s.start_s, endS: s.end_s }));
  }
}
