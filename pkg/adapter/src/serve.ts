/** Wire protocol v1 request loop over stdin/stdout.
 *
 * handshake  <- {"op": "hello"}
 *            -> {"protocol": 1, "name": "<scorer name>"}
 * request    <- {"id": "<id>", "text": "<text>"}
 *            -> {"id": "<id>", "p": <number in [0,1]>}
 *
 * A malformed request line produces an error response naming the line
 * number; the process keeps serving.
 */

import { createInterface } from "node:readline";
import { loadModel, score, type ScorerModel } from "./model.js";

export function serve(modelPath: string, overrideName?: string): Promise<void> {
  const model: ScorerModel = loadModel(modelPath);
  const name = overrideName ?? model.name;
  const out = process.stdout;
  const reader = createInterface({ input: process.stdin, terminal: false });
  let lineNo = 0;

  return new Promise<void>((resolve) => {
    reader.on("line", (line) => {
      lineNo++;
      const trimmed = line.trim();
      if (!trimmed) return;
      let request: unknown;
      try {
        request = JSON.parse(trimmed);
      } catch {
        out.write(JSON.stringify({ error: "malformed request", line: lineNo }) + "\n");
        return;
      }
      const obj = request as { op?: unknown; id?: unknown; text?: unknown };
      if (obj.op === "hello") {
        out.write(JSON.stringify({ protocol: 1, name }) + "\n");
        return;
      }
      if (typeof obj.id !== "string" || typeof obj.text !== "string") {
        out.write(
          JSON.stringify({ error: "expected {id, text}", line: lineNo }) + "\n",
        );
        return;
      }
      out.write(JSON.stringify({ id: obj.id, p: score(model, obj.text) }) + "\n");
    });
    reader.on("close", () => resolve());
  });
}
