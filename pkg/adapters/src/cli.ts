#!/usr/bin/env node
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import {
  readAudioManifest,
  runAsr,
  runCategorical,
  runDimensional,
  runGender,
  runVad,
  type AdapterResult,
} from "./adapters.js";
import type { InferenceBackend } from "./backends.js";
import { HttpBackend } from "./http.js";
import { writeJsonlAtomic } from "./jsonl.js";
import { loadManifest, type AdapterManifest } from "./manifest.js";
import { MockBackend } from "./mock.js";
import { readPlan } from "./plan.js";

function log(event: string, fields: Record<string, unknown> = {}, level = "info"): void {
  process.stderr.write(JSON.stringify({ ts: Date.now() / 1000, level, event, ...fields }) + "\n");
}

interface CommonArgs {
  manifest?: string;
  seed?: number;
  endpoint?: string;
  out: string;
}

function setup(argv: CommonArgs): { manifest: AdapterManifest; backend: InferenceBackend } {
  let manifest = loadManifest(argv.manifest);
  if (argv.seed !== undefined) manifest = { ...manifest, seed: argv.seed };
  if (argv.endpoint !== undefined) manifest = { ...manifest, endpoint: argv.endpoint };
  const backend = manifest.endpoint
    ? new HttpBackend(manifest.endpoint, { apiKeyEnv: manifest.api_key_env ?? undefined })
    : new MockBackend(manifest.seed);
  return { manifest, backend };
}

function finish(result: AdapterResult, out: string, event: string): void {
  for (const failure of result.failures) {
    log("sample_failed", { sample_id: failure.sampleId, error: failure.error }, "warning");
  }
  writeJsonlAtomic(out, result.lines);
  log(event, { rows: result.lines.length, failures: result.failures.length, out });
}

const common = {
  manifest: { type: "string" as const, describe: "adapter manifest JSON" },
  seed: { type: "number" as const, describe: "override the manifest seed (mock backend)" },
  endpoint: { type: "string" as const, describe: "model server base URL (default: mock)" },
  out: { type: "string" as const, demandOption: true as const, describe: "output JSONL" },
};

async function main(): Promise<number> {
  try {
    await yargs(hideBin(process.argv))
      .scriptName("paraqa-adapters")
      .strict()
      .demandCommand(1)
      .command(
        "categorical",
        "emit per-model emotion posteriors for each planned window",
        { ...common, plan: { type: "string" as const, demandOption: true as const }, models: { type: "array" as const, string: true as const, describe: "override categorical model ids" } },
        async (argv) => {
          const { manifest, backend } = setup(argv);
          const models = (argv.models as string[] | undefined) ?? manifest.models.categorical;
          finish(await runCategorical(readPlan(argv.plan), backend, models), argv.out, "categorical");
        },
      )
      .command(
        "dimensional",
        "emit valence/arousal/dominance for each planned window",
        { ...common, plan: { type: "string" as const, demandOption: true as const } },
        async (argv) => {
          const { manifest, backend } = setup(argv);
          finish(await runDimensional(readPlan(argv.plan), backend, manifest.models.dimensional), argv.out, "dimensional");
        },
      )
      .command(
        "gender",
        "emit speaker gender for each planned window",
        { ...common, plan: { type: "string" as const, demandOption: true as const } },
        async (argv) => {
          const { manifest, backend } = setup(argv);
          finish(await runGender(readPlan(argv.plan), backend, manifest.models.gender), argv.out, "gender");
        },
      )
      .command(
        "asr",
        "emit word-level transcripts for each clip",
        { ...common, audio: { type: "string" as const, demandOption: true as const } },
        async (argv) => {
          const { manifest, backend } = setup(argv);
          finish(await runAsr(readAudioManifest(argv.audio), backend, manifest.models.asr), argv.out, "asr");
        },
      )
      .command(
        "vad",
        "emit voiced spans for each clip",
        { ...common, audio: { type: "string" as const, demandOption: true as const } },
        async (argv) => {
          const { manifest, backend } = setup(argv);
          finish(await runVad(readAudioManifest(argv.audio), backend, manifest.models.vad), argv.out, "vad");
        },
      )
      .fail((msg, err) => {
        throw err ?? new Error(msg);
      })
      .parseAsync();
    return 0;
  } catch (err) {
    log("error", { error: (err as Error).message }, "error");
    return 2;
  }
}

main().then((code) => {
  process.exitCode = code;
});
