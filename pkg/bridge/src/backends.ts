import type { Token } from "./conllu.js";
import { naiveParse } from "./naive.js";

export interface Backend {
  name: string;
  version: string;
  /** Tokens for one raw sentence, or null when it cannot be parsed. */
  parse(line: string): Promise<Token[] | null>;
}

export class BackendUnavailable extends Error {}

const NAIVE_VERSION = "0.1.0";

class NaiveBackend implements Backend {
  name = "naive";
  version = NAIVE_VERSION;

  async parse(line: string): Promise<Token[] | null> {
    const tokens = naiveParse(line);
    return tokens.length ? tokens : null;
  }
}

/**
 * Client for an external parser served over HTTP.  Expects POST /parse
 * with {"sentences": [line]} to answer {"sentences": [[{form, pos, head,
 * dep}, ...]]}; a sentence slot may be null for per-sentence failures.
 */
class HttpBackend implements Backend {
  name = "ltp-http";
  version: string;
  private url: string;

  constructor() {
    const url = process.env.LTP_SERVER_URL;
    if (!url) {
      throw new BackendUnavailable(
        "backend 'ltp-http' needs LTP_SERVER_URL pointing at a parser " +
        "service; start one or fall back to --backend naive",
      );
    }
    this.url = url.replace(/\/$/, "");
    this.version = this.url;
  }

  async parse(line: string): Promise<Token[] | null> {
    let res: Response;
    try {
      res = await fetch(`${this.url}/parse`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ sentences: [line] }),
      });
    } catch (err) {
      throw new BackendUnavailable(
        `parser service at ${this.url} is unreachable (${err}); ` +
        "start it or fall back to --backend naive",
      );
    }
    if (!res.ok) {
      throw new BackendUnavailable(`parser service answered ${res.status}`);
    }
    const payload = (await res.json()) as { sentences: Array<Array<{
      form: string; pos: string; head: number; dep: string }> | null> };
    const rows = payload.sentences?.[0];
    if (!rows || rows.length === 0) return null;
    return rows.map((r, i) => ({
      index: i + 1, form: r.form, pos: r.pos, head: r.head, dep: r.dep,
    }));
  }
}

export function getBackend(name: string): Backend {
  switch (name) {
    case "naive":
      return new NaiveBackend();
    case "ltp-http":
      return new HttpBackend();
    default:
      throw new BackendUnavailable(
        `unknown backend '${name}'; available: naive, ltp-http`,
      );
  }
}
