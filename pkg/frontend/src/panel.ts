/**
 * The staged-feedback panel state: transcription echo, plan interpretation,
 * and per-method explanations, shown before anything changes in the scene.
 * Confirm and Abort are enabled only while a turn is pending.
 */

import type { PlanDoc, TurnDoc } from "./types.js";

export interface PanelView {
  turnIndex: number | null;
  transcription: string;
  planText: string;
  message: string;
  explanations: string[];
  highlightNames: string[];
  confirmEnabled: boolean;
  abortEnabled: boolean;
  status: string;
}

const EMPTY: PanelView = {
  turnIndex: null,
  transcription: "",
  planText: "",
  message: "",
  explanations: [],
  highlightNames: [],
  confirmEnabled: false,
  abortEnabled: false,
  status: "idle",
};

/** Object names mentioned by the staged program, used for highlighting. */
export function referencedNames(sourceCode: string, known: string[]): string[] {
  const out: string[] = [];
  for (const name of known) {
    if (sourceCode.includes(name) && !out.includes(name)) out.push(name);
  }
  return out;
}

export class FeedbackPanel {
  view: PanelView = { ...EMPTY };
  private listeners: Array<(view: PanelView) => void> = [];

  onChange(listener: (view: PanelView) => void): void {
    this.listeners.push(listener);
  }

  showTurn(turn: TurnDoc, knownObjectNames: string[]): void {
    const plan: PlanDoc | undefined = turn.stages.plan;
    const pending = turn.status === "pending";
    this.view = {
      turnIndex: turn.index,
      transcription: turn.stages.transcription ?? turn.prompt,
      planText: plan?.Instruction ?? "",
      message: plan?.Message ?? "",
      explanations: (turn.stages.explanations ?? []).map((e) => e.plainLanguage),
      highlightNames: turn.stages.envelope
        ? referencedNames(turn.stages.envelope.SourceCode, knownObjectNames)
        : [],
      confirmEnabled: pending,
      abortEnabled: pending,
      status: turn.status,
    };
    this.notify();
  }

  turnResolved(turnIndex: number, status: string): void {
    if (this.view.turnIndex !== turnIndex) return;
    this.view = { ...this.view, status, confirmEnabled: false, abortEnabled: false };
    this.notify();
  }

  clear(): void {
    this.view = { ...EMPTY };
    this.notify();
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this.view);
  }
}
