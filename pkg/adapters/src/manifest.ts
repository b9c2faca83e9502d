import fs from "node:fs";
import { z } from "zod";

/** Pinned checkpoint identifiers; outputs are only comparable across runs
 * when these (and the seed, for the mock) are identical. */
export const manifestSchema = z
  .object({
    models: z
      .object({
        categorical: z.array(z.string().min(1)).min(1),
        dimensional: z.string().min(1),
        gender: z.string().min(1),
        asr: z.string().min(1),
        vad: z.string().min(1),
      })
      .strict(),
    device: z.enum(["cpu", "cuda"]).default("cpu"),
    seed: z.number().int().nonnegative().default(0),
    endpoint: z.string().min(1).nullable().default(null),
    api_key_env: z.string().min(1).nullable().default(null),
  })
  .strict();

export type AdapterManifest = z.infer<typeof manifestSchema>;

export const DEFAULT_MANIFEST: AdapterManifest = {
  models: {
    categorical: [
      "emotion2vec-plus-base@1.0",
      "emotion2vec-plus-large@1.0",
      "emotion2vec-plus-seed@1.0",
    ],
    dimensional: "wav2vec2-large-robust-valence@1.0",
    gender: "wavlm-ecapa-gender@1.0",
    asr: "whisperx-large-v2@1.0",
    vad: "silero-vad@4.0",
  },
  device: "cpu",
  seed: 0,
  endpoint: null,
  api_key_env: null,
};

export function loadManifest(file?: string): AdapterManifest {
  if (!file) return DEFAULT_MANIFEST;
  let raw: unknown;
  try {
    raw = JSON.parse(fs.readFileSync(file, "utf8"));
  } catch (err) {
    throw new Error(`${file}: ${(err as Error).message}`);
  }
  const parsed = manifestSchema.safeParse(raw);
  if (!parsed.success) {
    const issue = parsed.error.issues[0];
    throw new Error(`${file}: ${issue?.path.join(".")}: ${issue?.message}`);
  }
  return parsed.data;
}
