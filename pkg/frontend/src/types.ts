/** Wire types mirrored from the service's canonical JSON documents. */

export interface Vec3Doc {
  x: number;
  y: number;
  z: number;
}

export interface ObjectDoc {
  id: string;
  name: string;
  kind: string;
  position: Vec3Doc;
  rotation: { yaw: number; pitch: number; roll: number };
  size: { w: number; h: number; d: number };
  color: { r: number; g: number; b: number; a: number };
  illuminated: boolean;
  luminousIntensity: number;
  levitated: boolean;
  wallMounted: string | null;
}

export interface TriggerDoc {
  object: string;
  event: string;
  handler: string;
  enabled: boolean;
  index: number;
}

export interface AuthoringDoc {
  objects: ObjectDoc[];
  triggers: TriggerDoc[];
  step: number;
}

export interface SceneDoc extends AuthoringDoc {
  room: { width: number; depth: number; height: number; walls: { id: string }[] };
  userPose: PoseDoc;
}

export interface PoseDoc {
  position: [number, number, number];
  eyeHeight: number;
  yaw: number;
  pitch: number;
  hand?: [number, number, number];
  pointing?: { origin: [number, number, number]; direction: [number, number, number] };
}

export interface SceneDelta {
  created?: ObjectDoc[];
  removed?: string[];
  updated?: ObjectDoc[];
  triggers?: TriggerDoc[];
  step?: number;
}

export interface GestureSampleDoc {
  t: number;
  origin: [number, number, number];
  direction: [number, number, number];
}

export interface PlanDoc {
  Instruction: string | null;
  Message: string;
  Tasks: { index: number; type: string; description: string }[];
}

export interface EnvelopeDoc {
  ClassName: string;
  Methods: { MethodName: string; Description: string; Explanation: string }[];
  SourceCode: string;
}

export interface TurnDoc {
  index: number;
  prompt: string;
  status: "pending" | "confirmed" | "executed" | "aborted" | "failed";
  stages: {
    transcription?: string;
    plan?: PlanDoc;
    envelope?: EnvelopeDoc;
    explanations?: { methodName: string; plainLanguage: string }[];
  };
  error?: { code: string; message: string } | null;
}

export type FeedEvent =
  | { seq: number; type: "stage"; turn: number; stage: string; payload: unknown }
  | { seq: number; type: "delta"; turn: number; delta: SceneDelta }
  | {
      seq: number;
      type: "tick";
      tick: number;
      fired: { object: string; event: string; handler: string }[];
      delta: SceneDelta;
    }
  | { seq: number; type: "turn"; turn: number; status: TurnDoc["status"]; error?: unknown };
