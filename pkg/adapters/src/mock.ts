import type { InferenceBackend, VoicedSpan, WordSpan } from "./backends.js";
import type { PlanWindow } from "./plan.js";
import { EMOTIONS, type Emotion, type GenderValue } from "./schemas.js";

// FNV-1a, 32 bit: stable across runs and platforms.
function fnv1a(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const ASSIGNABLE: Emotion[] = ["angry", "disgusted", "fearful", "happy", "sad", "surprised"];

// Typical valence per dominant emotion, so the categorical and dimensional
// mocks stay correlated the way real recognizers are.
const VALENCE_BASE: Record<Emotion, number> = {
  angry: 0.15,
  disgusted: 0.15,
  fearful: 0.2,
  sad: 0.2,
  happy: 0.8,
  surprised: 0.55,
  neutral: 0.5,
  other: 0.5,
  unknown: 0.5,
};

const VOCABULARY = (
  "so then we thought the whole plan would change but nobody told the crew " +
  "and everyone kept waiting for another call about the late schedule"
).split(" ");

function round3(v: number): number {
  return Math.round(v * 1000) / 1000;
}

/**
 * Deterministic stand-in for the real recognizers.
 *
 * Every value is derived by hashing (seed, kind, model, sample, span), so
 * reruns are identical and models disagree with each other. Each sample
 * gets a dominant emotion and a valence profile that matches it, which is
 * what the downstream consistency filtering expects from real speech.
 */
export class MockBackend implements InferenceBackend {
  constructor(private readonly seed = 0) {}

  private rng(...parts: (string | number)[]): () => number {
    return mulberry32(fnv1a([this.seed, ...parts].join("|")));
  }

  /** The emotion this sample leans toward; hash-chosen but fixed per sample. */
  dominantEmotion(sampleId: string): Emotion {
    return ASSIGNABLE[fnv1a(`${this.seed}|bias|${sampleId}`) % ASSIGNABLE.length];
  }

  async posterior(modelId: string, sampleId: string, _audioUri: string, win: PlanWindow) {
    const rand = this.rng("cat", modelId, sampleId, win.raw.coreStart, win.raw.coreEnd);
    const bias = this.dominantEmotion(sampleId);
    const weights = EMOTIONS.map((cat) => rand() + (cat === bias ? 4.0 : 0.0));
    const total = weights.reduce((a, b) => a + b, 0);
    const entries = EMOTIONS.map((cat, i) => [cat, weights[i] / total] as const);
    return Object.fromEntries(entries) as Record<Emotion, number>;
  }

  async dimensions(modelId: string, sampleId: string, _audioUri: string, win: PlanWindow) {
    const rand = this.rng("dim", modelId, sampleId, win.raw.coreStart, win.raw.coreEnd);
    const base = VALENCE_BASE[this.dominantEmotion(sampleId)];
    const clamp = (v: number) => Math.min(0.999, Math.max(0.001, v));
    return {
      valence: round3(clamp(base + (rand() - 0.5) * 0.2)),
      arousal: round3(0.2 + rand() * 0.6),
      dominance: round3(0.2 + rand() * 0.6),
    };
  }

  async gender(modelId: string, sampleId: string, _audioUri: string, win: PlanWindow) {
    const rand = this.rng("gender", modelId, sampleId, win.raw.coreStart, win.raw.coreEnd);
    // One speaker dominates a sample; occasional windows flip.
    const primary: GenderValue = fnv1a(`${this.seed}|speaker|${sampleId}`) % 2 ? "female" : "male";
    const flip = rand() < 0.1;
    const gender: GenderValue = flip ? (primary === "male" ? "female" : "male") : primary;
    return { gender, confidence: round3(0.6 + rand() * 0.39) };
  }

  async words(modelId: string, sampleId: string, _audioUri: string, durationS: number): Promise<WordSpan[]> {
    const rand = this.rng("asr", modelId, sampleId);
    const out: WordSpan[] = [];
    let cursor = round3(rand() * 0.4);
    let k = 0;
    for (;;) {
      const length = round3(0.12 + rand() * 0.45);
      if (cursor + length > durationS) break;
      out.push({
        text: VOCABULARY[(fnv1a(`${sampleId}|w${k}`) + k) % VOCABULARY.length],
        startS: cursor,
        endS: round3(cursor + length),
      });
      cursor = round3(cursor + length + rand() * 0.3);
      k += 1;
    }
    return out;
  }

  async voicedSpans(modelId: string, sampleId: string, _audioUri: string, durationS: number): Promise<VoicedSpan[]> {
    const rand = this.rng("vad", modelId, sampleId);
    const out: VoicedSpan[] = [];
    let cursor = round3(rand() * 0.8);
    while (cursor < durationS - 0.5) {
      const voiced = Math.min(round3(cursor + 1.0 + rand() * 5.0), durationS);
      out.push({ startS: cursor, endS: voiced });
      cursor = round3(voiced + 0.2 + rand() * 1.3);
    }
    return out;
  }
}
