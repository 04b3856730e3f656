import assert from "node:assert/strict";
import { test } from "node:test";

import type { TopicView } from "../src/api.js";
import {
  LabelingBuffer,
  gridFromLedger,
  highlightSegments,
  parseLabels,
  previewQueryTerms,
  rowLaunchable,
  selectionPayload,
} from "../src/state.js";

function view(labeling: TopicView["labeling"]): TopicView {
  return {
    run_id: "lda-0001",
    topic_id: 0,
    n_topics: 3,
    terms: [],
    documents: [],
    labeling,
  };
}

test("multi-label entry splits on slashes", () => {
  assert.deepEqual(parseLabels("Payments/Job requirements"), [
    "Payments",
    "Job requirements",
  ]);
  assert.deepEqual(parseLabels("  Rating system  "), ["Rating system"]);
  assert.deepEqual(parseLabels(""), []);
});

test("labeling buffer tracks dirtiness and never drops edits silently", () => {
  const buffer = new LabelingBuffer();
  buffer.load(view(null));
  assert.equal(buffer.dirty(), false);
  buffer.labels = ["Payments"];
  assert.equal(buffer.dirty(), true);
  buffer.load(view({
    labels: ["Payments"],
    theme_refs: [8],
    excluded_terms: [],
    annotator: "a",
    timestamp: "",
    revision: "r1",
  }));
  assert.equal(buffer.dirty(), false);
  buffer.toggleTheme(8);
  assert.equal(buffer.dirty(), true);
  buffer.toggleTheme(8);
  assert.equal(buffer.dirty(), false);
});

test("random toggle clears theme refs and labels", () => {
  const buffer = new LabelingBuffer();
  buffer.load(view(null));
  buffer.labels = ["something"];
  buffer.toggleTheme(3);
  buffer.setRandom(true);
  const payload = buffer.payload("me");
  assert.deepEqual(payload.labels, ["Random"]);
  assert.deepEqual(payload.theme_refs, []);
});

test("grid rows carry column provenance and included flags", () => {
  const rows = gridFromLedger(
    [
      {
        key: "theme:7",
        label: "Bookings and working hours",
        theme_id: 7,
        common: ["schedule", "book"],
        unique_a: ["slot"],
        unique_b: ["cancel"],
        proposed: [],
      },
      {
        key: "theme:11",
        label: "COVID-19-related discussions",
        theme_id: 11,
        common: [],
        unique_a: [],
        unique_b: [],
        proposed: ["pandemic", "COVID-19"],
      },
    ],
    { "theme:7": { excluded_terms: ["slot"] } },
  );
  assert.equal(rows[0].proposedOnly, false);
  assert.equal(rows[1].proposedOnly, true);
  const slot = rows[0].terms.find((t) => t.term === "slot")!;
  assert.equal(slot.included, false);
  assert.equal(slot.column, "unique_a");
  assert.deepEqual(selectionPayload(rows[0]), ["slot"]);
});

test("query preview lowercases, dedupes, and drops excluded terms", () => {
  const rows = gridFromLedger(
    [
      {
        key: "theme:11",
        label: "COVID-19-related discussions",
        theme_id: 11,
        common: [],
        unique_a: [],
        unique_b: [],
        proposed: ["pandemic", "COVID-19", "lockdown"],
      },
    ],
    {},
  );
  assert.deepEqual(previewQueryTerms(rows[0]), [
    "pandemic",
    "covid-19",
    "lockdown",
  ]);
  rows[0].terms.forEach((t) => (t.included = false));
  assert.equal(rowLaunchable(rows[0]), false);
});

test("highlight segments cover the text exactly once", () => {
  const text = "the booking schedule fills";
  const spans = [
    { start: 4, end: 11 },
    { start: 12, end: 20 },
  ];
  const segments = highlightSegments(text, spans);
  assert.equal(segments.map((s) => s.text).join(""), text);
  assert.deepEqual(
    segments.filter((s) => s.marked).map((s) => s.text),
    ["booking", "schedule"],
  );
});
