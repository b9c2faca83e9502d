import { z } from "zod";

/** The nine emotion categories, in the wire order (alphabetical). */
export const EMOTIONS = [
  "angry",
  "disgusted",
  "fearful",
  "happy",
  "neutral",
  "other",
  "sad",
  "surprised",
  "unknown",
] as const;
export type Emotion = (typeof EMOTIONS)[number];

export const GENDERS = ["male", "female", "unknown"] as const;
export type GenderValue = (typeof GENDERS)[number];

const seconds = z.number().finite().nonnegative();
const unit = z.number().min(0).max(1);

export const windowSchema = z
  .object({
    window_start_s: seconds,
    window_end_s: seconds,
    core_start_s: seconds,
    core_end_s: seconds,
  })
  .refine(
    (w) =>
      w.window_start_s <= w.core_start_s &&
      w.core_start_s < w.core_end_s &&
      w.core_end_s <= w.window_end_s,
    { message: "window must contain its core" },
  );

export const planRowSchema = z.object({
  sample_id: z.string().min(1),
  audio_uri: z.string().min(1),
  windows: z.array(windowSchema).min(1),
});

export const audioRowSchema = z.object({
  sample_id: z.string().min(1),
  audio_uri: z.string().min(1),
  duration_s: z.number().positive(),
});

const posteriorSchema = z
  .record(z.enum(EMOTIONS), unit)
  .refine((p) => Object.keys(p).length === EMOTIONS.length, {
    message: "posterior must cover all nine categories",
  })
  .refine(
    (p) => Math.abs(Object.values(p).reduce((a, b) => a + b, 0) - 1) <= 1e-6,
    { message: "posterior must sum to 1" },
  );

export const categoricalFragmentSchema = z.object({
  sample_id: z.string().min(1),
  model_id: z.string().min(1),
  core_start_s: seconds,
  core_end_s: seconds,
  window_start_s: seconds,
  window_end_s: seconds,
  posterior: posteriorSchema,
});

export const dimensionalFragmentSchema = z.object({
  sample_id: z.string().min(1),
  core_start_s: seconds,
  core_end_s: seconds,
  window_start_s: seconds,
  window_end_s: seconds,
  valence: unit,
  arousal: unit,
  dominance: unit,
});

export const genderFragmentSchema = z.object({
  sample_id: z.string().min(1),
  core_start_s: seconds,
  core_end_s: seconds,
  gender: z.enum(GENDERS),
  confidence: unit,
});

export const transcriptRowSchema = z.object({
  sample_id: z.string().min(1),
  utterance: z.string(),
  words: z.array(
    z
      .object({ text: z.string().min(1), start_s: seconds, end_s: seconds })
      .refine((w) => w.start_s < w.end_s, { message: "word start must precede end" }),
  ),
});

export const vadRowSchema = z.object({
  sample_id: z.string().min(1),
  audio_uri: z.string().min(1),
  spans: z.array(
    z
      .object({ start_s: seconds, end_s: seconds })
      .refine((s) => s.start_s < s.end_s, { message: "span start must precede end" }),
  ),
});
