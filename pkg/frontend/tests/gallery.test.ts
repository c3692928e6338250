import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Gallery, PAGE_SIZE } from "../src/gallery.js";

function apiWithMolecules(total: number): ApiClient {
  const smiles = Array.from({ length: total }, (_, i) => `C${"C".repeat(i % 5)}`);
  return new ApiClient("", async (input) => {
    const url = new URL(String(input), "http://x");
    const offset = Number(url.searchParams.get("offset") ?? 0);
    const limit = Number(url.searchParams.get("limit") ?? 20);
    return new Response(
      JSON.stringify({
        total,
        offset,
        limit,
        smiles: smiles.slice(offset, offset + limit),
      }),
      { status: 200 },
    );
  });
}

describe("molecule gallery", () => {
  it("shows 20 structures per page", async () => {
    const gallery = new Gallery(apiWithMolecules(45), "n1");
    await gallery.load(0);
    expect(gallery.root.querySelectorAll("img").length).toBe(PAGE_SIZE);
    expect(gallery.pageCount).toBe(3);
  });

  it("last page holds the remainder", async () => {
    const gallery = new Gallery(apiWithMolecules(45), "n1");
    await gallery.load(2);
    expect(gallery.root.querySelectorAll("img").length).toBe(5);
    const label = gallery.root.querySelector(".gallery-nav span");
    expect(label?.textContent).toContain("page 3 / 3");
  });

  it("img sources hit the svg endpoint with the encoded smiles", async () => {
    const gallery = new Gallery(apiWithMolecules(1), "n1");
    await gallery.load(0);
    const img = gallery.root.querySelector("img")!;
    expect(img.src).toContain("/molecules/svg?smiles=C");
    expect(img.alt).toBe("C");
  });

  it("nav buttons disable at the edges", async () => {
    const gallery = new Gallery(apiWithMolecules(45), "n1");
    await gallery.load(0);
    const [prev, next] = gallery.root.querySelectorAll("button");
    expect(prev.disabled).toBe(true);
    expect(next.disabled).toBe(false);
  });
});
