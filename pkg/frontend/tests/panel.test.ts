import { describe, expect, it } from "vitest";
import { FeedbackPanel, referencedNames } from "../src/panel.js";
import type { TurnDoc } from "../src/types.js";

function stagedTurn(status: TurnDoc["status"] = "pending"): TurnDoc {
  return {
    index: 3,
    prompt: "create a table with a lamp on it",
    status,
    stages: {
      transcription: "create a table with a lamp on it",
      plan: {
        Instruction: "1. Create a table in front of the user. 2. Create a lamp on top of the table.",
        Message: "Working on it.",
        Tasks: [
          { index: 0, type: "Create", description: "Create a table in front of the user." },
          { index: 1, type: "Create", description: "Create a lamp on top of the table." },
        ],
      },
      envelope: {
        ClassName: "CreateTablePlan",
        Methods: [{ MethodName: "CreateTable1", Description: "d", Explanation: "e" }],
        SourceCode: "program CreateTablePlan { method CreateTable1 { create table as table-1 } }",
      },
      explanations: [
        { methodName: "CreateTable1", plainLanguage: "Creates a table in front of you." },
      ],
    },
    error: null,
  };
}

describe("FeedbackPanel", () => {
  it("shows all three stages before any scene change", () => {
    const panel = new FeedbackPanel();
    panel.showTurn(stagedTurn(), []);
    expect(panel.view.transcription).toContain("create a table");
    expect(panel.view.planText).toContain("1. Create a table");
    expect(panel.view.explanations).toHaveLength(1);
  });

  it("enables confirm and abort only while pending", () => {
    const panel = new FeedbackPanel();
    panel.showTurn(stagedTurn("pending"), []);
    expect(panel.view.confirmEnabled).toBe(true);
    expect(panel.view.abortEnabled).toBe(true);
    panel.showTurn(stagedTurn("executed"), []);
    expect(panel.view.confirmEnabled).toBe(false);
    expect(panel.view.abortEnabled).toBe(false);
  });

  it("disables buttons when the turn resolves via the stream", () => {
    const panel = new FeedbackPanel();
    panel.showTurn(stagedTurn("pending"), []);
    panel.turnResolved(3, "aborted");
    expect(panel.view.status).toBe("aborted");
    expect(panel.view.confirmEnabled).toBe(false);
  });

  it("ignores resolutions for other turns", () => {
    const panel = new FeedbackPanel();
    panel.showTurn(stagedTurn("pending"), []);
    panel.turnResolved(99, "executed");
    expect(panel.view.confirmEnabled).toBe(true);
  });

  it("highlights objects the staged program references", () => {
    const panel = new FeedbackPanel();
    panel.showTurn(stagedTurn("pending"), ["table-1", "chair-7"]);
    expect(panel.view.highlightNames).toEqual(["table-1"]);
  });
});

describe("referencedNames", () => {
  it("finds only known names present in the source", () => {
    const src = "program P { method M { moveTo chair-1 next_to table-1 } }";
    expect(referencedNames(src, ["table-1", "chair-1", "lamp-9"]))
      .toEqual(["table-1", "chair-1"]);
  });
});
