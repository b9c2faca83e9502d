export {
  readAudioManifest,
  runAsr,
  runCategorical,
  runDimensional,
  runGender,
  runVad,
} from "./adapters.js";
export type { AdapterResult, AudioRow } from "./adapters.js";
export type { InferenceBackend, VoicedSpan, WordSpan } from "./backends.js";
export { HttpBackend } from "./http.js";
export { readJsonl, writeJsonlAtomic } from "./jsonl.js";
export { DEFAULT_MANIFEST, loadManifest, manifestSchema } from "./manifest.js";
export type { AdapterManifest } from "./manifest.js";
export { MockBackend } from "./mock.js";
export { readPlan } from "./plan.js";
export type { PlanRow, PlanWindow } from "./plan.js";
export {
  EMOTIONS,
  GENDERS,
  audioRowSchema,
  categoricalFragmentSchema,
  dimensionalFragmentSchema,
  genderFragmentSchema,
  planRowSchema,
  transcriptRowSchema,
  vadRowSchema,
} from "./schemas.js";
