import { describe, expect, it } from "vitest";

import { ApiClient, Job } from "../src/api.js";
import { BASE_INTERVAL_MS, JobPoller, MAX_INTERVAL_MS, nextInterval } from "../src/poll.js";

function jobResponse(state: Job["state"], extra: Partial<Job> = {}): Response {
  const body: Job = {
    id: "j1",
    workspace: "w",
    parent: "p",
    method: "search",
    state,
    node: state === "done" ? "n9" : null,
    progress: { stage: "search" },
    error: state === "failed" ? "boom" : null,
    ...extra,
  };
  return new Response(JSON.stringify(body), { status: 200 });
}

describe("job polling", () => {
  it("backs off from 1s toward the 5s cap", () => {
    let t = BASE_INTERVAL_MS;
    const seen = [t];
    for (let i = 0; i < 6; i++) {
      t = nextInterval(t);
      seen.push(t);
    }
    expect(seen[0]).toBe(1000);
    expect(seen).toEqual([1000, 1500, 2250, 3375, 5000, 5000, 5000]);
    expect(Math.max(...seen)).toBe(MAX_INTERVAL_MS);
  });

  it("polls until done and reports every snapshot", async () => {
    const states: Job["state"][] = ["queued", "running", "running", "done"];
    let calls = 0;
    const api = new ApiClient("", async () => jobResponse(states[calls++]));
    const updates: string[] = [];
    const waits: number[] = [];
    await new Promise<void>((resolve) => {
      const poller = new JobPoller(api, "j1", {
        onUpdate: (job) => updates.push(job.state),
        onDone: () => resolve(),
        setTimeoutFn: (fn, ms) => {
          waits.push(ms);
          fn();
          return 0;
        },
      });
      poller.start();
    });
    expect(updates).toEqual(["queued", "running", "running", "done"]);
    expect(waits.slice(1)).toEqual([1500, 2250, 3375]);
  });

  it("a failed job stops polling and carries its error", async () => {
    const api = new ApiClient("", async () => jobResponse("failed"));
    const done = await new Promise<Job>((resolve) => {
      new JobPoller(api, "j1", {
        onUpdate: () => {},
        onDone: resolve,
        setTimeoutFn: (fn) => {
          fn();
          return 0;
        },
      }).start();
    });
    expect(done.state).toBe("failed");
    expect(done.error).toBe("boom");
  });

  it("stop() halts future ticks", async () => {
    let calls = 0;
    const api = new ApiClient("", async () => {
      calls++;
      return jobResponse("running");
    });
    const pending: (() => void)[] = [];
    const poller = new JobPoller(api, "j1", {
      onUpdate: () => {},
      onDone: () => {},
      setTimeoutFn: (fn) => {
        pending.push(fn);
        return 0;
      },
    });
    poller.start();
    pending.shift()!();
    await new Promise((r) => setTimeout(r, 0));
    expect(calls).toBe(1);
    poller.stop();
    pending.shift()!();
    await new Promise((r) => setTimeout(r, 0));
    expect(calls).toBe(1);
  });
});
