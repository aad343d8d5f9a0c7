import type { Token } from "./conllu.js";

/**
 * Deterministic heuristic parser: greedy longest-match segmentation over a
 * small lexicon with single-character fallback, then a flat dependency
 * tree around the first verb (or the last content token).  Linguistically
 * shallow on purpose; its one job is emitting valid, format-correct
 * parses wherever no real parser backend is reachable.
 */

const LEXICON: Record<string, string> = {
  // verbs
  是: "v", 喜欢: "v", 访问: "v", 成立: "v", 位于: "v", 发布: "v",
  研究: "v", 爱: "v", 有: "v", 参观: "v", 收购: "v", 会见: "v",
  送给: "v", 扩建: "v", 出版: "v", 支持: "v", 工作: "v", 学习: "v",
  // nouns
  音乐: "n", 公司: "ni", 学生: "n", 学校: "ni", 大学: "ni", 首都: "n",
  产品: "n", 计划: "n", 数学: "n", 总统: "n", 课程: "n", 工厂: "n",
  老师: "n", 朋友: "n", 城市: "n", 书: "n", 报告: "n", 项目: "n",
  // proper nouns
  北京: "ns", 中国: "ns", 上海: "ns", 法国: "ns", 南昌: "ns",
  小明: "nh", 李华: "nh", 张伟: "nh", 王芳: "nh",
  // function words
  在: "p", 由: "p", 从: "p", 往: "p", 对: "p",
  的: "u", 了: "u", 着: "u",
  不: "d", 很: "d", 已经: "d", 没有: "d", 都: "d",
  和: "c", 与: "c",
  他: "r", 她: "r", 我们: "r", 它: "r",
  一: "m", 二: "m", 三: "m", 五: "m", 十: "m", 一本: "m",
  个: "q", 种: "q", 本: "q", 名: "q",
};

const MAX_WORD = 3;
const PUNCT = new Set([
  ...".,!?;:()[]\"'",
  ..."，。！？、；：（）《》",
  ..."“”‘’—…·",
]);
const NOUNISH = new Set(["n", "nh", "ni", "nl", "ns", "nt", "nz", "nd", "r", "ws"]);

function classifyChar(ch: string): string {
  if (PUNCT.has(ch)) return "wp";
  if (/[0-9０-９]/.test(ch)) return "m";
  if (/[A-Za-zＡ-Ｚａ-ｚ]/.test(ch)) return "ws";
  return "n";
}

function segment(chunk: string): Array<{ form: string; pos: string }> {
  const out: Array<{ form: string; pos: string }> = [];
  let i = 0;
  while (i < chunk.length) {
    let matched = false;
    for (let len = Math.min(MAX_WORD, chunk.length - i); len >= 2; len -= 1) {
      const cand = chunk.slice(i, i + len);
      if (LEXICON[cand]) {
        out.push({ form: cand, pos: LEXICON[cand] });
        i += len;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    const ch = chunk[i];
    out.push({ form: ch, pos: LEXICON[ch] ?? classifyChar(ch) });
    i += 1;
  }
  // merge adjacent single Latin letters / digits into one token
  const merged: Array<{ form: string; pos: string }> = [];
  for (const tok of out) {
    const prev = merged[merged.length - 1];
    if (prev && prev.pos === tok.pos && (tok.pos === "ws" || tok.pos === "m")
        && !(LEXICON[prev.form] || LEXICON[tok.form])) {
      prev.form += tok.form;
    } else {
      merged.push({ ...tok });
    }
  }
  return merged;
}

function depFor(pos: string, beforeRoot: boolean): string {
  if (pos === "wp") return "WP";
  if (pos === "v") return "COO";
  if (pos === "u") return "RAD";
  if (pos === "c") return "LAD";
  if (pos === "m" || pos === "q") return "ATT";
  if (pos === "p" || pos === "d" || pos === "a") return "ADV";
  if (NOUNISH.has(pos)) return beforeRoot ? "SBV" : "VOB";
  return "IS";
}

export function naiveParse(line: string): Token[] {
  const pieces: Array<{ form: string; pos: string }> = [];
  for (const chunk of line.split(/\s+/)) {
    if (chunk) pieces.push(...segment(chunk));
  }
  // a line with no content tokens is garbage, not a sentence
  if (pieces.every((p) => p.pos === "wp")) return [];

  let rootIdx = pieces.findIndex((p) => p.pos === "v");
  if (rootIdx < 0) {
    rootIdx = pieces.length - 1;
    while (rootIdx > 0 && pieces[rootIdx].pos === "wp") rootIdx -= 1;
  }
  return pieces.map((p, i) => ({
    index: i + 1,
    form: p.form,
    pos: p.pos,
    head: i === rootIdx ? 0 : rootIdx + 1,
    dep: i === rootIdx ? "HED" : depFor(p.pos, i < rootIdx),
  }));
}
