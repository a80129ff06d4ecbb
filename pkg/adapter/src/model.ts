/** Trainable text scorer: averaged token embeddings -> tanh -> linear ->
 * sigmoid. Stands in for a fine-tuned transformer classifier at desk scale;
 * training is plain seeded SGD so runs are bit-reproducible. */

import { readFileSync, writeFileSync } from "node:fs";
import { mulberry32, shuffled } from "./rng.js";
import { tokenize } from "./text.js";

export const MODEL_FORMAT_VERSION = 1;

export interface AdapterConfig {
  baseModel: string;
  maxSequenceLength: number;
  epochs: number;
  learningRate: number;
  seed: number;
  trainFile: string;
  outputModel: string;
  name: string;
  embeddingDim: number;
  trainFraction: number;
}

export interface SeedRow {
  text: string;
  label: number;
}

export interface ScorerModel {
  formatVersion: number;
  name: string;
  baseModel: string;
  maxSequenceLength: number;
  seed: number;
  vocab: string[];
  embeddingDim: number;
  embeddings: number[][]; // vocab x dim
  head: number[]; // dim
  bias: number;
}

export function defaultConfig(partial: Partial<AdapterConfig>): AdapterConfig {
  const config: AdapterConfig = {
    baseModel: "embedding-avg-v1",
    maxSequenceLength: 64,
    epochs: 1,
    learningRate: 0.5,
    seed: 7,
    trainFile: "",
    outputModel: "",
    name: "adapter",
    embeddingDim: 32,
    trainFraction: 0.9,
    ...partial,
  };
  if (config.epochs < 1) throw new Error("epochs must be >= 1");
  if (config.maxSequenceLength < 16) {
    throw new Error("max sequence length must be >= 16");
  }
  if (config.trainFraction <= 0 || config.trainFraction >= 1) {
    throw new Error("train fraction must be in (0, 1)");
  }
  return config;
}

export function loadSeedFile(path: string): SeedRow[] {
  const rows: SeedRow[] = [];
  const lines = readFileSync(path, "utf-8").split("\n");
  lines.forEach((line, i) => {
    const trimmed = line.trim();
    if (!trimmed) return;
    let obj: unknown;
    try {
      obj = JSON.parse(trimmed);
    } catch (err) {
      throw new Error(`${path}:${i + 1}: not JSON: ${(err as Error).message}`);
    }
    const { text, label } = obj as { text?: unknown; label?: unknown };
    if (typeof text !== "string" || (label !== 0 && label !== 1)) {
      throw new Error(`${path}:${i + 1}: expected {"text": string, "label": 0|1}`);
    }
    rows.push({ text, label });
  });
  if (rows.length === 0) throw new Error(`${path}: empty training file`);
  return rows;
}

export function splitRows(
  rows: readonly SeedRow[],
  trainFraction: number,
  seed: number,
): { train: SeedRow[]; test: SeedRow[] } {
  const order = shuffled(rows, mulberry32(seed ^ 0x5eed));
  let nTrain = Math.round(trainFraction * rows.length);
  nTrain = Math.min(Math.max(nTrain, 1), rows.length - 1);
  return { train: order.slice(0, nTrain), test: order.slice(nTrain) };
}

function buildVocab(rows: readonly SeedRow[], maxSequenceLength: number): string[] {
  const terms = new Set<string>();
  for (const row of rows) {
    for (const tok of tokenize(row.text, maxSequenceLength)) terms.add(tok);
  }
  return [...terms].sort();
}

function sigmoid(z: number): number {
  if (z >= 0) return 1 / (1 + Math.exp(-z));
  const e = Math.exp(z);
  return e / (1 + e);
}

export function score(model: ScorerModel, text: string): number {
  const index = vocabIndex(model);
  const ids: number[] = [];
  for (const tok of tokenize(text, model.maxSequenceLength)) {
    const id = index.get(tok);
    if (id !== undefined) ids.push(id);
  }
  const d = model.embeddingDim;
  const avg = new Float64Array(d);
  if (ids.length > 0) {
    for (const id of ids) {
      const row = model.embeddings[id];
      for (let j = 0; j < d; j++) avg[j] += row[j];
    }
    for (let j = 0; j < d; j++) avg[j] /= ids.length;
  }
  let z = model.bias;
  for (let j = 0; j < d; j++) z += model.head[j] * Math.tanh(avg[j]);
  return sigmoid(z);
}

const vocabCache = new WeakMap<ScorerModel, Map<string, number>>();

function vocabIndex(model: ScorerModel): Map<string, number> {
  let index = vocabCache.get(model);
  if (!index) {
    index = new Map(model.vocab.map((t, i) => [t, i]));
    vocabCache.set(model, index);
  }
  return index;
}

export interface TrainResult {
  model: ScorerModel;
  heldOutAccuracy: number;
  finalLoss: number;
  trainSize: number;
  testSize: number;
}

export function train(config: AdapterConfig): TrainResult {
  const rows = loadSeedFile(config.trainFile);
  const labels = new Set(rows.map((r) => r.label));
  if (labels.size < 2) {
    throw new Error("training file has a single class; need both labels 0 and 1");
  }
  const { train: trainRows, test: testRows } = splitRows(
    rows,
    config.trainFraction,
    config.seed,
  );

  const vocab = buildVocab(trainRows, config.maxSequenceLength);
  const d = config.embeddingDim;
  const rand = mulberry32(config.seed);
  const model: ScorerModel = {
    formatVersion: MODEL_FORMAT_VERSION,
    name: config.name,
    baseModel: config.baseModel,
    maxSequenceLength: config.maxSequenceLength,
    seed: config.seed,
    vocab,
    embeddingDim: d,
    embeddings: vocab.map(() =>
      Array.from({ length: d }, () => (rand() - 0.5) * 0.2),
    ),
    head: Array.from({ length: d }, () => (rand() - 0.5) * 0.2),
    bias: 0,
  };
  const index = new Map(vocab.map((t, i) => [t, i]));
  const encoded = trainRows.map((row) => ({
    ids: tokenize(row.text, config.maxSequenceLength)
      .map((t) => index.get(t))
      .filter((id): id is number => id !== undefined),
    y: row.label,
  }));

  let finalLoss = 0;
  try {
    for (let epoch = 0; epoch < config.epochs; epoch++) {
      const eta = config.learningRate / (1 + epoch);
      const order = shuffled(encoded, mulberry32(config.seed + 31 * (epoch + 1)));
      let lossSum = 0;
      for (const sample of order) {
        const { ids, y } = sample;
        const avg = new Float64Array(d);
        for (const id of ids) {
          const row = model.embeddings[id];
          for (let j = 0; j < d; j++) avg[j] += row[j];
        }
        if (ids.length > 0) for (let j = 0; j < d; j++) avg[j] /= ids.length;
        const hidden = new Float64Array(d);
        let z = model.bias;
        for (let j = 0; j < d; j++) {
          hidden[j] = Math.tanh(avg[j]);
          z += model.head[j] * hidden[j];
        }
        const p = sigmoid(z);
        lossSum += y === 1 ? -Math.log(Math.max(p, 1e-12)) : -Math.log(Math.max(1 - p, 1e-12));
        const dz = p - y;
        for (let j = 0; j < d; j++) {
          const gHead = dz * hidden[j];
          const gAvg = dz * model.head[j] * (1 - hidden[j] * hidden[j]);
          model.head[j] -= eta * gHead;
          if (ids.length > 0) {
            const gEmb = (eta * gAvg) / ids.length;
            for (const id of ids) model.embeddings[id][j] -= gEmb;
          }
        }
        model.bias -= eta * dz;
      }
      finalLoss = lossSum / encoded.length;
    }
  } catch (err) {
    if (err instanceof RangeError) {
      throw new Error(
        "training ran out of memory; retry with a smaller --max-seq-length " +
          "or --embedding-dim",
      );
    }
    throw err;
  }

  let correct = 0;
  for (const row of testRows) {
    const predicted = score(model, row.text) >= 0.5 ? 1 : 0;
    if (predicted === row.label) correct++;
  }
  return {
    model,
    heldOutAccuracy: correct / testRows.length,
    finalLoss,
    trainSize: trainRows.length,
    testSize: testRows.length,
  };
}

export function saveModel(path: string, model: ScorerModel): void {
  writeFileSync(path, JSON.stringify(model) + "\n", "utf-8");
}

export function loadModel(path: string): ScorerModel {
  const model = JSON.parse(readFileSync(path, "utf-8")) as ScorerModel;
  if (model.formatVersion !== MODEL_FORMAT_VERSION) {
    throw new Error(
      `${path}: unsupported model format version ${model.formatVersion} ` +
        `(expected ${MODEL_FORMAT_VERSION})`,
    );
  }
  return model;
}
