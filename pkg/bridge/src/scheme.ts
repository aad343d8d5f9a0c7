import { readFileSync } from "node:fs";

export type TagScheme = {
  posTags: string[];
  depLabels: string[];
  rootLabel: string;
};

// LTP-style inventories; WP included because the naive backend attaches
// punctuation explicitly.
export const DEFAULT_SCHEME: TagScheme = {
  posTags: [
    "a", "b", "c", "d", "e", "g", "h", "i", "j", "k",
    "m", "n", "nd", "nh", "ni", "nl", "ns", "nt", "nz", "o",
    "p", "q", "r", "u", "v", "wp", "ws", "x", "z",
  ],
  depLabels: [
    "SBV", "VOB", "IOB", "FOB", "DBL", "ATT", "ADV",
    "CMP", "COO", "POB", "LAD", "RAD", "IS", "HED", "WP",
  ],
  rootLabel: "HED",
};

export function loadScheme(path: string): TagScheme {
  const raw = JSON.parse(readFileSync(path, "utf-8"));
  if (!Array.isArray(raw.pos_tags) || !Array.isArray(raw.dep_labels) ||
      typeof raw.root_label !== "string") {
    throw new Error(`bad scheme file ${path}: need pos_tags, dep_labels, root_label`);
  }
  const scheme: TagScheme = {
    posTags: raw.pos_tags.map(String),
    depLabels: raw.dep_labels.map(String),
    rootLabel: raw.root_label,
  };
  if (!scheme.depLabels.includes(scheme.rootLabel)) {
    throw new Error(`bad scheme file ${path}: root label not in dep_labels`);
  }
  return scheme;
}
