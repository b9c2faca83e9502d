import type { PlanWindow } from "./plan.js";
import type { Emotion, GenderValue } from "./schemas.js";

export interface WordSpan {
  text: string;
  startS: number;
  endS: number;
}

export interface VoicedSpan {
  startS: number;
  endS: number;
}

/**
 * One inference call per adapter kind. Real deployments implement this
 * against whatever serves the models; tests and dry runs use MockBackend.
 */
export interface InferenceBackend {
  posterior(modelId: string, sampleId: string, audioUri: string, win: PlanWindow): Promise<Record<Emotion, number>>;
  dimensions(
    modelId: string,
    sampleId: string,
    audioUri: string,
    win: PlanWindow,
  ): Promise<{ valence: number; arousal: number; dominance: number }>;
  gender(
    modelId: string,
    sampleId: string,
    audioUri: string,
    win: PlanWindow,
  ): Promise<{ gender: GenderValue; confidence: number }>;
  words(modelId: string, sampleId: string, audioUri: string, durationS: number): Promise<WordSpan[]>;
  voicedSpans(modelId: string, sampleId: string, audioUri: string, durationS: number): Promise<VoicedSpan[]>;
}
