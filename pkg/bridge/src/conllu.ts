import type { TagScheme } from "./scheme.js";

export type Token = {
  index: number; // 1-based
  form: string;
  pos: string;
  head: number; // 0 = root
  dep: string;
};

export type Sentence = {
  sentId: string;
  text: string;
  tokens: Token[];
};

/** One CoNLL-U block, comments included, trailing blank line omitted. */
export function formatBlock(s: Sentence): string {
  const lines = [`# sent_id = ${s.sentId}`, `# text = ${s.text}`];
  for (const t of s.tokens) {
    lines.push(`${t.index}\t${t.form}\t_\t${t.pos}\t_\t_\t${t.head}\t${t.dep}\t_\t_`);
  }
  return lines.join("\n");
}

/**
 * Mirror of the consumer's sentence invariants: every block the bridge
 * writes must come back empty from this check.
 */
export function validateSentence(s: Sentence, scheme: TagScheme): string[] {
  const problems: string[] = [];
  const n = s.tokens.length;
  if (n === 0) return ["sentence has no tokens"];

  s.tokens.forEach((t, i) => {
    if (t.index !== i + 1) problems.push(`token ${i + 1}: index field is ${t.index}`);
    if (!scheme.posTags.includes(t.pos)) problems.push(`token ${t.index}: pos '${t.pos}' not in scheme`);
    if (!scheme.depLabels.includes(t.dep)) problems.push(`token ${t.index}: dep '${t.dep}' not in scheme`);
    if (t.head < 0 || t.head > n) problems.push(`token ${t.index}: head ${t.head} out of range`);
    else if (t.head === t.index) problems.push(`token ${t.index}: head points at itself`);
  });

  const roots = s.tokens.filter((t) => t.head === 0).map((t) => t.index);
  if (roots.length === 0) problems.push("no root token (head=0)");
  else if (roots.length > 1) problems.push(`multiple roots at ${roots.join(",")}`);
  else {
    const root = s.tokens[roots[0] - 1];
    if (root.dep !== scheme.rootLabel) {
      problems.push(`token ${root.index}: root dep '${root.dep}' is not '${scheme.rootLabel}'`);
    }
  }

  if (problems.length === 0) {
    const children = new Map<number, number[]>();
    for (const t of s.tokens) {
      const kids = children.get(t.head) ?? [];
      kids.push(t.index);
      children.set(t.head, kids);
    }
    const reached = new Set<number>();
    const stack = [...roots];
    while (stack.length) {
      const cur = stack.pop()!;
      if (reached.has(cur)) continue;
      reached.add(cur);
      stack.push(...(children.get(cur) ?? []));
    }
    if (reached.size !== n) {
      const missing = s.tokens.map((t) => t.index).filter((i) => !reached.has(i));
      problems.push(`head cycle at tokens ${missing.join(",")}`);
    }
  }

  // greedy text cover, skipping whitespace between forms
  let pos = 0;
  for (const t of s.tokens) {
    while (pos < s.text.length && /\s/.test(s.text[pos])) pos += 1;
    if (s.text.slice(pos, pos + t.form.length) !== t.form) {
      problems.push(`token ${t.index}: form '${t.form}' not found in text at offset ${pos}`);
      return problems;
    }
    pos += t.form.length;
  }
  while (pos < s.text.length && /\s/.test(s.text[pos])) pos += 1;
  if (pos !== s.text.length) problems.push(`text has unaligned trailing content at offset ${pos}`);
  return problems;
}
