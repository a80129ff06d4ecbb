#!/usr/bin/env node
/** scorer-adapter CLI: `finetune` trains a scorer from a line-delimited
 * (text, label) file; `serve` answers wire-protocol v1 requests on stdio. */

import { defaultConfig, saveModel, train } from "./model.js";
import { serve } from "./serve.js";

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) throw new Error(`unexpected argument ${arg}`);
    const value = argv[i + 1];
    if (value === undefined || value.startsWith("--")) {
      throw new Error(`flag ${arg} needs a value`);
    }
    flags.set(arg.slice(2), value);
    i++;
  }
  return flags;
}

function numeric(flags: Map<string, string>, name: string): number | undefined {
  const raw = flags.get(name);
  if (raw === undefined) return undefined;
  const value = Number(raw);
  if (!Number.isFinite(value)) throw new Error(`--${name} must be a number`);
  return value;
}

const USAGE = `usage:
  scorer-adapter finetune --data <seed.jsonl> --out <model.json>
      [--name NAME] [--epochs N] [--learning-rate X] [--seed N]
      [--max-seq-length N] [--embedding-dim N] [--train-fraction X]
  scorer-adapter serve --model <model.json> [--name NAME]
`;

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  if (command === "finetune") {
    const flags = parseFlags(rest);
    const data = flags.get("data");
    const out = flags.get("out");
    if (!data || !out) throw new Error("finetune needs --data and --out");
    const config = defaultConfig({
      trainFile: data,
      outputModel: out,
      name: flags.get("name") ?? "adapter",
      epochs: numeric(flags, "epochs") ?? 1,
      learningRate: numeric(flags, "learning-rate") ?? 0.5,
      seed: numeric(flags, "seed") ?? 7,
      maxSequenceLength: numeric(flags, "max-seq-length") ?? 64,
      embeddingDim: numeric(flags, "embedding-dim") ?? 32,
      trainFraction: numeric(flags, "train-fraction") ?? 0.9,
    });
    const result = train(config);
    saveModel(config.outputModel, result.model);
    process.stderr.write(
      `trained ${config.name} on ${result.trainSize} rows ` +
        `(${result.testSize} held out): accuracy ${result.heldOutAccuracy.toFixed(4)}, ` +
        `final epoch loss ${result.finalLoss.toFixed(6)}\n`,
    );
    process.stdout.write(
      JSON.stringify({
        model: config.outputModel,
        held_out_accuracy: result.heldOutAccuracy,
        final_loss: result.finalLoss,
      }) + "\n",
    );
    return 0;
  }
  if (command === "serve") {
    const flags = parseFlags(rest);
    const model = flags.get("model");
    if (!model) throw new Error("serve needs --model");
    await serve(model, flags.get("name"));
    return 0;
  }
  process.stderr.write(USAGE);
  return command === undefined || command === "--help" ? 0 : 2;
}

main()
  .then((code) => process.exit(code))
  .catch((err) => {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    process.exit(1);
  });
