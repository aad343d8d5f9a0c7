#!/usr/bin/env node
/**
 * bridge-parse: raw text (one sentence per line) -> CoNLL-U-like parse file.
 *
 * Usage: bridge-parse --in TEXT --out CONLLU [--backend NAME] [--scheme FILE]
 *
 * The backend may also be set via BRIDGE_BACKEND.  Every emitted sentence
 * passes the consumer's validation under the declared scheme; lines the
 * backend cannot handle are skipped and listed on stderr (exit stays 0).
 * An unavailable backend exits 1 with a remediation hint; bad flags exit 2.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { BackendUnavailable, getBackend } from "./backends.js";
import { formatBlock, validateSentence, type Sentence } from "./conllu.js";
import { DEFAULT_SCHEME, loadScheme, type TagScheme } from "./scheme.js";

type Args = {
  input: string;
  output: string;
  backend: string;
  scheme?: string;
};

function parseArgs(argv: string[]): Args {
  const args: Partial<Args> = { backend: process.env.BRIDGE_BACKEND ?? "naive" };
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) throw new UsageError(`missing value for ${flag}`);
    switch (flag) {
      case "--in": args.input = value; break;
      case "--out": args.output = value; break;
      case "--backend": args.backend = value; break;
      case "--scheme": args.scheme = value; break;
      default: throw new UsageError(`unknown flag ${flag}`);
    }
  }
  if (!args.input || !args.output) {
    throw new UsageError("usage: bridge-parse --in TEXT --out CONLLU [--backend NAME] [--scheme FILE]");
  }
  return args as Args;
}

class UsageError extends Error {}

export async function run(argv: string[]): Promise<number> {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`usage error: ${err.message}`);
      return 2;
    }
    throw err;
  }

  let scheme: TagScheme;
  let backend;
  try {
    scheme = args.scheme ? loadScheme(args.scheme) : DEFAULT_SCHEME;
    backend = getBackend(args.backend);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }

  let text: string;
  try {
    text = readFileSync(args.input, "utf-8");
  } catch (err) {
    console.error(`error: cannot read ${args.input}: ${(err as Error).message}`);
    return 1;
  }

  const blocks: string[] = [`# backend = ${backend.name} ${backend.version}`];
  const skipped: string[] = [];
  const lines = text.length ? text.split("\n") : [];
  if (lines.length && lines[lines.length - 1] === "") lines.pop();

  for (let lineNo = 1; lineNo <= lines.length; lineNo += 1) {
    const line = lines[lineNo - 1];
    if (!line.trim()) continue;
    let tokens;
    try {
      tokens = await backend.parse(line);
    } catch (err) {
      if (err instanceof BackendUnavailable) {
        console.error(`error: ${err.message}`);
        return 1;
      }
      throw err;
    }
    if (!tokens) {
      skipped.push(`line ${lineNo}: backend produced no tokens`);
      continue;
    }
    const sentence: Sentence = { sentId: String(lineNo), text: line, tokens };
    const problems = validateSentence(sentence, scheme);
    if (problems.length) {
      skipped.push(`line ${lineNo}: ${problems[0]}`);
      continue;
    }
    blocks.push(formatBlock(sentence));
  }

  try {
    writeFileSync(args.output, blocks.join("\n\n") + "\n", "utf-8");
  } catch (err) {
    console.error(`error: cannot write ${args.output}: ${(err as Error).message}`);
    return 1;
  }
  for (const item of skipped) console.error(`skipped ${item}`);
  console.error(`wrote ${blocks.length - 1} sentences, skipped ${skipped.length}`);
  return 0;
}

const invokedDirectly = process.argv[1]?.endsWith("cli.js");
if (invokedDirectly) {
  run(process.argv.slice(2)).then((code) => process.exit(code));
}
