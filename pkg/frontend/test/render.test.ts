import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import { main } from "../src/render.js";

const FIXTURES = path.join(path.dirname(fileURLToPath(import.meta.url)), "fixtures");

function tmpFile(name: string): string {
  return path.join(fs.mkdtempSync(path.join(os.tmpdir(), "lrsim-plots-")), name);
}

describe("render CLI", () => {
  it("renders fig2 end to end", () => {
    const out = tmpFile("fig2.svg");
    const code = main([
      "--style", "fig2",
      "--samples", path.join(FIXTURES, "sweep.csv"),
      "--fit", path.join(FIXTURES, "fit.json"),
      "--output", out,
    ]);
    expect(code).toBe(0);
    expect(fs.readFileSync(out, "utf8")).toContain("</svg>");
  });

  it("renders fig3 end to end", () => {
    const out = tmpFile("fig3.svg");
    const reports = ["report-n50.json", "report-n100.json", "report-n200.json"]
      .map((name) => path.join(FIXTURES, name))
      .join(",");
    const code = main(["--style", "fig3", "--reports", reports, "--output", out]);
    expect(code).toBe(0);
    expect(fs.readFileSync(out, "utf8")).toContain("whole-system QSP");
  });

  it("fails with a nonzero code on an empty CSV", () => {
    const empty = tmpFile("empty.csv");
    fs.writeFileSync(empty, "");
    const code = main([
      "--style", "fig2",
      "--samples", empty,
      "--fit", path.join(FIXTURES, "fit.json"),
    ]);
    expect(code).toBe(2);
  });

  it("fails on an unknown style or missing inputs", () => {
    expect(main(["--style", "pie"])).toBe(2);
    expect(main(["--style", "fig2"])).toBe(2);
    expect(main(["--style", "fig3", "--reports", "/does/not/exist.json"])).toBe(2);
  });
});
