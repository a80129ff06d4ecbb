/** Tokenization mirroring the pipeline's cleaning: the hub already sends
 * cleaned text, so this pass is a no-op there, but finetune may read rawer
 * seed files. */

const URL_RE = /(?:https?:\/\/|www\.)\S+/g;
const MENTION_RE = /@\w+/g;
const HASHTAG_RE = /#\w+/g;
const NON_WORD_RE = /[^\p{L}\p{N}]+/gu;

export function tokenize(text: string, maxTokens: number): string[] {
  const cleaned = text
    .replace(URL_RE, " ")
    .replace(MENTION_RE, " ")
    .replace(HASHTAG_RE, " ")
    .replace(NON_WORD_RE, " ")
    .toLowerCase();
  const tokens = cleaned.split(/\s+/).filter(Boolean);
  return tokens.slice(0, maxTokens);
}
