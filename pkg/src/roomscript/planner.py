"""Deterministic planner: controlled natural language to task plans to SOL.

The grammar covers the bundled referent vocabulary plus a synonym table;
anything outside it routes to the null branch (a clarification message) or to
the LLM backend when that mode is enabled. Identical inputs always produce
byte-identical plans and source.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .catalog import PALETTE, Catalog
from .config import Thresholds
from .errors import EmptyAfterNormalize, EngineError, NoHistory
from .pose import GestureTimeline, UserPose
from .scene import Scene
from .sol.ast import Method, Placement, SolProgram, Statement, ValueExpr
from .sol.explainer import explain_method
from .sol.printer import print_program
from .spatial import Selector, resolve_deictic, resolve_selector

SYNONYMS = {
    "sofa": "couch",
    "light": "lamp",
    "lightbulb": "lamp",
    "led": "lamp",
    "box": "cube",
    "ball": "sphere",
    "picture": "painting",
    "photo": "painting",
    "bookshelf": "cabinet",
    "bookcase": "cabinet",
    "shelf": "cabinet",
    "pot": "plant",
    "flowerpot": "plant",
    "bunny": "rabbit",
    "puppy": "dog",
    "kitten": "cat",
}

# two-word nouns collapse before kind lookup
BIGRAMS = {
    ("coffee", "table"): "table",
    ("flower", "pot"): "plant",
    ("led", "light"): "lamp",
    ("floor", "switch"): "switch",
    ("light", "switch"): "switch",
}

CATEGORY_WORDS = {"animal": "animal", "furniture": "furniture", "primitive": "primitive",
                  "object": None, "thing": None, "item": None}

NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6,
    "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11, "twelve": 12,
}

SIZE_ADJS = {"small": "small", "little": "small", "tiny": "small", "smallest": "small",
             "big": "big", "large": "big", "huge": "big", "largest": "big", "biggest": "big"}

CREATE_VERBS = {"create", "put", "place", "generate", "build", "add", "drop", "spawn",
                "make", "give", "want", "need", "set"}
MOVE_VERBS = {"move", "put", "place", "bring", "relocate", "shift", "set"}

TRIGGER_SUBJECTS = {"people", "someone", "somebody", "anyone", "anybody", "i", "you",
                    "we", "he", "she", "they", "person", "user", "visitor"}

FILLERS = {"-uh-", "uh", "um", "-um-", "now", "ok", "okay", "so", "well", "just",
           "really", "very", "also"}

WALL_WORDS = {"north", "south", "east", "west"}


@dataclass(frozen=True)
class Token:
    word: str
    ts: float
    index: int


@dataclass
class PromptContext:
    text: str
    token_timestamps: list[float] | None = None
    timeline: GestureTimeline | None = None
    pose: UserPose = field(default_factory=UserPose)


@dataclass
class PlannedTask:
    index: int
    type: str  # Create | Edit | Interact
    description: str
    action: dict


@dataclass
class TaskPlan:
    instruction: str | None
    message: str
    tasks: list[PlannedTask] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {
            "Instruction": self.instruction,
            "Message": self.message,
            "Tasks": [
                {"index": t.index, "type": t.type, "description": t.description}
                for t in self.tasks
            ],
        }


# -- normalization -------------------------------------------------------------

_POLITE_PREFIXES = [
    ("please",), ("kindly",),
    ("can", "you", "help", "me", "to"), ("can", "you", "help", "me"),
    ("could", "you", "help", "me", "to"), ("could", "you", "help", "me"),
    ("can", "you"), ("could", "you"), ("would", "you"), ("will", "you"),
    ("help", "me", "to"), ("help", "me"),
    ("i", "want", "you", "to"), ("i", "want", "to"), ("i", "want"),
    ("i", "need"), ("i", "would", "like"), ("let", "us"), ("lets",),
]
_POLITE_SUFFIXES = [("thank", "you"), ("thanks",), ("please",), ("for", "me")]


def _raw_tokens(text: str, timestamps: list[float] | None) -> list[Token]:
    words = text.split()
    tokens = []
    for i, raw in enumerate(words):
        word = raw.strip(".,!?;:'\"()").lower()
        if not word:
            continue
        ts = timestamps[i] if timestamps is not None and i < len(timestamps) else i * 150.0
        tokens.append(Token(word, ts, i))
    return tokens


def normalize(text: str, timestamps: list[float] | None = None) -> list[Token]:
    """Lowercase, strip politeness and fillers, keep the imperative core.

    Deictic tokens keep the timestamp of the original word.
    """
    tokens = [t for t in _raw_tokens(text, timestamps) if t.word not in FILLERS]
    changed = True
    while changed and tokens:
        changed = False
        for pattern in _POLITE_PREFIXES:
            if len(tokens) >= len(pattern) and tuple(t.word for t in tokens[:len(pattern)]) == pattern:
                tokens = tokens[len(pattern):]
                changed = True
                break
    changed = True
    while changed and tokens:
        changed = False
        for pattern in _POLITE_SUFFIXES:
            if len(tokens) >= len(pattern) and tuple(t.word for t in tokens[-len(pattern):]) == pattern:
                tokens = tokens[:-len(pattern)]
                changed = True
                break
    if not tokens:
        raise EmptyAfterNormalize("nothing actionable remains after normalization")
    return tokens


def _sentences(text: str) -> list[str]:
    parts = re.split(r"(?<=[.!?;])\s+", text.strip())
    out = []
    for part in parts:
        for clause in re.split(r"\band then\b|,\s*then\b", part):
            clause = clause.strip()
            if clause:
                out.append(clause)
    return out


# -- phrase parsing helpers ------------------------------------------------------


class _Cursor:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self, offset: int = 0) -> str | None:
        j = self.i + offset
        return self.tokens[j].word if j < len(self.tokens) else None

    def token(self, offset: int = 0) -> Token | None:
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else None

    def take(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def match(self, *words: str) -> bool:
        for k, w in enumerate(words):
            if self.peek(k) != w:
                return False
        self.i += len(words)
        return True

    def done(self) -> bool:
        return self.i >= len(self.tokens)

    def rest(self) -> list[Token]:
        return self.tokens[self.i:]


def _singular(word: str) -> str:
    if word.endswith("ies"):
        return word[:-3] + "y"
    if word.endswith("es") and word[:-2] in ("box",):
        return word[:-2]
    if word.endswith("s") and not word.endswith("ss"):
        return word[:-1]
    return word


class Grammar:
    def __init__(self, scene: Scene, catalog: Catalog):
        self.scene = scene
        self.catalog = catalog

    def kind_of(self, word: str) -> str | None:
        base = _singular(word)
        if self.catalog.has(base):
            return base
        if base in SYNONYMS and self.catalog.has(SYNONYMS[base]):
            return SYNONYMS[base]
        return None

    def category_of(self, word: str) -> str | None:
        base = _singular(word)
        if base in CATEGORY_WORDS and CATEGORY_WORDS[base]:
            return CATEGORY_WORDS[base]
        if base in ("animal",):
            return "animal"
        return None

    def parse_count(self, cur: _Cursor) -> int | None:
        w = cur.peek()
        if w is None:
            return None
        if w.isdigit():
            cur.take()
            try:
                return int(w)
            except ValueError:  # digit-like glyphs ("¹") are not numbers
                return None
        if w in NUMBER_WORDS:
            cur.take()
            return NUMBER_WORDS[w]
        return None

    def parse_selector(self, cur: _Cursor, stop_words: set[str] | None = None) -> Selector | None:
        """Noun-phrase selector: determiner, adjectives, noun, view qualifier."""
        stop_words = stop_words or set()
        start = cur.i
        sel = Selector()
        indefinite = False

        w = cur.peek()
        if w in ("the", "a", "an", "my"):
            indefinite = w in ("a", "an")
            cur.take()
        elif w in ("this", "that", "these", "those"):
            tok = cur.take()
            sel.deictic = tok.word
            sel.deictic_ts = tok.ts
            sel.singular = tok.word in ("this", "that")
        elif w == "all":
            cur.take()
            sel.singular = False
            if cur.peek() == "the":
                cur.take()
        elif w in ("it", "them"):
            cur.take()
            sel.name = "__anaphor__"
            sel.singular = w == "it"
            return sel

        while True:
            w = cur.peek()
            if w is None or w in stop_words:
                break
            if w in SIZE_ADJS:
                sel.size_term = SIZE_ADJS[w]
                cur.take()
                continue
            if w in PALETTE:
                nxt = cur.peek(1)
                if nxt is not None and (w, nxt) not in BIGRAMS:
                    sel.color = w
                    cur.take()
                    continue
            break

        w = cur.peek()
        if w is None or w in stop_words:
            if sel.deictic:  # bare "this"/"that"
                return sel
            cur.i = start
            return None

        nxt = cur.peek(1)
        if nxt is not None and (w, nxt) in BIGRAMS:
            kind = BIGRAMS[(w, nxt)]
            cur.take()
            cur.take()
            sel.kind = kind
        elif self.scene.find_by_name(w) is not None:
            sel.name = cur.take().word
        else:
            kind = self.kind_of(w)
            category = self.category_of(w)
            if kind is not None:
                raw = cur.take().word
                sel.kind = kind
                if raw.endswith("s") and not self.catalog.has(raw):
                    sel.singular = False
            elif category is not None:
                cur.take()
                sel.kind = category
                sel.singular = False  # category nouns are collective
            elif _singular(w) in CATEGORY_WORDS:  # object/thing/item(s), everything
                raw = cur.take().word
                sel.any_kind = True
                sel.singular = not raw.endswith("s")
            elif w == "everything":
                cur.take()
                sel.any_kind = True
                sel.singular = False
            elif sel.deictic:
                return sel
            else:
                cur.i = start
                return None

        if cur.match("on", "the", "left", "side") or cur.match("on", "the", "left"):
            sel.view_side = "on_the_left"
        elif cur.match("on", "the", "right", "side") or cur.match("on", "the", "right"):
            sel.view_side = "on_the_right"

        if sel.deictic in ("these", "those"):
            sel.singular = False
        sel._indefinite = indefinite  # type: ignore[attr-defined]
        return sel

    def parse_placement(self, cur: _Cursor) -> dict | None:
        """Placement phrase to an intermediate placement dict."""
        tok = cur.token()
        if tok is None:
            return None
        w = tok.word

        if w in ("here", "there"):
            cur.take()
            return {"tag": "deictic", "token": w, "ts": tok.ts}
        if cur.match("in", "front", "of", "me") or cur.match("in", "front", "of", "you"):
            return {"tag": "in_front_of_user"}
        if cur.match("behind", "me") or cur.match("behind", "you"):
            return {"tag": "behind_user"}
        if cur.match("away", "from", "me") or cur.match("away", "from", "you"):
            return {"tag": "away_from_user"}
        if cur.match("to", "my", "left") or cur.match("on", "my", "left"):
            return {"tag": "left_of_user"}
        if cur.match("to", "my", "right") or cur.match("on", "my", "right"):
            return {"tag": "right_of_user"}
        if cur.match("in", "front", "of"):
            ref = self.parse_selector(cur)
            return {"tag": "in_front_of", "ref": ref} if ref else None
        if w == "behind":
            cur.take()
            ref = self.parse_selector(cur)
            return {"tag": "behind", "ref": ref} if ref else None
        if cur.match("next", "to") or cur.match("beside",):
            ref = self.parse_selector(cur)
            return {"tag": "next_to", "ref": ref} if ref else None
        if cur.match("close", "to") or w == "near":
            if w == "near":
                cur.take()
            ref = self.parse_selector(cur)
            return {"tag": "near", "ref": ref} if ref else None
        if cur.match("on", "top", "of"):
            ref = self.parse_selector(cur)
            return {"tag": "on_top_of", "ref": ref} if ref else None
        if w in ("in", "at", "to") and cur.peek(1) == "the":
            if cur.peek(2) in ("middle", "center", "centre") and cur.peek(3) == "of":
                cur.take(); cur.take(); cur.take(); cur.take()
                if cur.peek() == "the":
                    cur.take()
                if cur.peek() == "room":
                    cur.take()
                return {"tag": "center_of_room"}
            if cur.peek(2) in WALL_WORDS and cur.peek(3) in WALL_WORDS and cur.peek(4) == "corner":
                cur.take(); cur.take()
                w1, w2 = cur.take().word, cur.take().word
                cur.take()
                return {"tag": "corner", "wall": w1, "wall2": w2}
        if w in ("on", "onto", "against", "to", "over", "above", "at"):
            # wall mounting / wall adjacency / support placement
            save = cur.i
            prep = cur.take().word
            if cur.peek() == "the" and cur.peek(1) in WALL_WORDS and cur.peek(2) == "wall":
                cur.take()
                wall = cur.take().word
                cur.take()
                tag = "against_wall" if prep in ("against", "to", "at") else "on_wall"
                return {"tag": tag, "wall": wall}
            if cur.match("the", "floor"):
                return {"tag": "floor"}
            ref = self.parse_selector(cur)
            if ref is not None and prep in ("on", "onto", "over", "above"):
                return {"tag": "on_top_of", "ref": ref}
            if ref is not None and prep in ("to", "at"):
                return {"tag": "next_to", "ref": ref}
            cur.i = save
            return None
        return None


# -- the planner -------------------------------------------------------------------


GREETING_WORDS = {"hello", "hi", "hey", "thanks", "thank", "goodbye", "bye", "how",
                  "what", "who", "why", "nice", "good", "great", "cool", "wow"}


class Planner:
    def __init__(self, scene: Scene, catalog: Catalog | None = None,
                 thresholds: Thresholds | None = None):
        self.scene = scene
        self.catalog = catalog or scene.catalog
        self.th = thresholds or Thresholds()
        self.grammar = Grammar(scene, self.catalog)

    # -- public API ------------------------------------------------------------

    def plan(self, context: PromptContext) -> TaskPlan:
        try:
            tokens = normalize(context.text, context.token_timestamps)
        except EmptyAfterNormalize:
            return TaskPlan(None, "You're welcome! Let me know when you want to change the room.")

        tasks: list[PlannedTask] = []
        last_created: dict | None = None
        for sentence_tokens in self._split_sentences(tokens, context.text):
            try:
                produced = self._plan_sentence(sentence_tokens, last_created)
            except _Unparseable as exc:
                return TaskPlan(None, self._fallback_message(sentence_tokens, str(exc)))
            base = len(tasks)
            for action in produced:
                _remap_created_refs(action, base)
                if action["op"] == "create":
                    last_created = action
                tasks.append(self._task(len(tasks), action))

        if not tasks:
            return TaskPlan(None, self._fallback_message(tokens, ""))
        instruction = " ".join(f"{t.index + 1}. {t.description}" for t in tasks)
        summary = "; ".join(t.description.rstrip(".") for t in tasks[:3])
        if len(tasks) > 3:
            summary += "; ..."
        return TaskPlan(instruction, f"Working on it: {summary}.", tasks)

    # -- helpers ---------------------------------------------------------------

    def _split_sentences(self, tokens: list[Token], text: str) -> list[list[Token]]:
        sentences = _sentences(text)
        if len(sentences) <= 1:
            return [tokens]
        groups: list[list[Token]] = []
        remaining = list(tokens)
        consumed_words = 0
        for sentence in sentences:
            count = len(sentence.split())
            group = [t for t in remaining if consumed_words <= t.index < consumed_words + count]
            consumed_words += count
            if group:
                groups.append(group)
        return groups or [tokens]

    def _task(self, index: int, action: dict) -> PlannedTask:
        return PlannedTask(index, action["type"], action["description"], action)

    def _fallback_message(self, tokens: list[Token], detail: str) -> str:
        words = {t.word for t in tokens}
        if words & GREETING_WORDS:
            return ("I'm here to help you shape the room. Ask me to create, move, "
                    "or change objects, or to set up an interaction.")
        base = "I couldn't turn that into scene tasks"
        if detail:
            base += f" ({detail})"
        return base + ". Could you rephrase it in terms of creating, editing, or wiring objects?"

    # -- sentence productions ---------------------------------------------------

    def _plan_sentence(self, tokens: list[Token], last_created: dict | None) -> list[dict]:
        cur = _Cursor(tokens)
        for production in (self._memory, self._arrange, self._interact,
                           self._edit, self._create):
            cur.i = 0
            actions = production(cur, last_created)
            if actions is not None:
                return actions
        raise _Unparseable("unsupported phrasing")

    # MEMORY: undo / put X back / restore X -------------------------------------

    def _memory(self, cur: _Cursor, last_created) -> list[dict] | None:
        if cur.match("undo", "that") or cur.match("undo", "it") or cur.match("undo",):
            return [{
                "op": "restore", "type": "Edit", "selector": None, "checkpoint": "previous",
                "scope": "scene", "description": "Undo the previous change.",
            }]
        if cur.match("withdraw", "the", "previous", "command"):
            return [{
                "op": "restore", "type": "Edit", "selector": None, "checkpoint": "previous",
                "scope": "scene", "description": "Undo the previous change.",
            }]

        save = cur.i
        if cur.peek() in ("put", "move", "bring", "make", "restore", "set"):
            verb = cur.take().word
            sel = self.grammar.parse_selector(cur, stop_words={"back", "to"})
            if sel is None:
                cur.i = save
                return None
            checkpoint = None
            if cur.peek() == "back" or verb == "restore":
                if cur.peek() == "back":
                    cur.take()
                checkpoint = "original"
            rest = [t.word for t in cur.rest()]
            if "previous" in rest:
                checkpoint = "previous"
            elif {"original", "initial"} & set(rest):
                checkpoint = "original"
            if checkpoint is None:
                cur.i = save
                return None
            desc_sel = sel.describe() if sel.name != "__anaphor__" else "it"
            state = "its original state" if checkpoint == "original" else "its previous state"
            return [{
                "op": "restore", "type": "Edit", "selector": sel, "checkpoint": checkpoint,
                "scope": "objects",
                "description": f"Restore the {desc_sel} to {state}.".replace("the it", "it"),
            }]
        return None

    # ARRANGE: set up / arrange / organize a room --------------------------------

    def _arrange(self, cur: _Cursor, last_created) -> list[dict] | None:
        matched = (cur.match("set", "up") or cur.match("arrange",) or
                   cur.match("organize",) or cur.match("organise",) or cur.match("tidy", "up"))
        if not matched:
            return None
        actions: list[dict] = []
        tables = self.scene.of_kind("table") or self.scene.of_kind("desk")
        if tables:
            table = tables[0]
            actions.append(self._move_action(Selector(name=table.name), {"tag": "center_of_room"},
                                             f"Move the {table.name} to the center of the room."))
            for plant in self.scene.of_kind("plant"):
                actions.append(self._move_action(
                    Selector(name=plant.name), {"tag": "on_top_of", "ref": Selector(name=table.name)},
                    f"Place the {plant.name} on top of the {table.name}."))
            for chair in self.scene.of_kind("chair")[:4]:
                actions.append(self._move_action(
                    Selector(name=chair.name), {"tag": "next_to", "ref": Selector(name=table.name)},
                    f"Move the {chair.name} next to the {table.name}."))
        corners = [("north", "west"), ("north", "east"), ("south", "west"), ("south", "east")]
        for i, lamp in enumerate(self.scene.of_kind("lamp")[:4]):
            w1, w2 = corners[i]
            actions.append(self._move_action(
                Selector(name=lamp.name), {"tag": "corner", "wall": w1, "wall2": w2},
                f"Move the {lamp.name} to the {w1}-{w2} corner."))
        for couch in self.scene.of_kind("couch")[:1]:
            actions.append(self._move_action(
                Selector(name=couch.name), {"tag": "against_wall", "wall": "south"},
                f"Move the {couch.name} against the south wall."))
        if not actions:
            raise _Unparseable("there is no furniture to arrange")
        return actions

    def _move_action(self, sel: Selector, placement: dict, description: str) -> dict:
        return {"op": "move", "type": "Edit", "selector": sel,
                "placement": placement, "description": description}

    # INTERACT: when <trigger>, <action> -----------------------------------------

    _TRIGGER_FAMILIES = [
        (("touches",), "touch"), (("touch",), "touch"), (("taps",), "touch"), (("tap",), "touch"),
        (("points", "at"), "point"), (("point", "at"), "point"),
        (("looks", "at"), "look"), (("look", "at"), "look"),
        (("faces",), "look"), (("face",), "look"),
        (("grabs",), "hold"), (("grab",), "hold"), (("holds",), "hold"), (("hold",), "hold"),
        (("picks", "up"), "hold"), (("pick", "up"), "hold"), (("takes",), "hold"), (("take",), "hold"),
        (("gets", "near"), "near"), (("get", "near"), "near"),
        (("gets", "close", "to"), "near"), (("get", "close", "to"), "near"),
        (("comes", "close", "to"), "near"), (("come", "close", "to"), "near"),
        (("comes", "near"), "near"), (("come", "near"), "near"),
        (("approaches",), "near"), (("approach",), "near"),
        (("walks", "on"), "near"), (("walk", "on"), "near"),
        (("walks", "over"), "near"), (("walk", "over"), "near"),
        (("steps", "on"), "near"), (("step", "on"), "near"),
        (("stands", "on"), "near"), (("stand", "on"), "near"),
        (("is", "near"), "near"), (("are", "near"), "near"),
    ]

    def _interact(self, cur: _Cursor, last_created) -> list[dict] | None:
        words = [t.word for t in cur.tokens]
        if "when" in words or "if" in words:
            split_word = "when" if "when" in words else "if"
            pos = words.index(split_word)
            if pos == 0:
                trigger_tokens, action_tokens = self._split_trigger(cur.tokens[1:])
            else:
                action_tokens = cur.tokens[:pos]
                trigger_tokens = cur.tokens[pos + 1:]
            if trigger_tokens is None:
                return None
            return self._build_interact(trigger_tokens, action_tokens)
        return None

    def _split_trigger(self, tokens: list[Token]) -> tuple[list[Token] | None, list[Token]]:
        # the trigger clause runs until the comma-less action verb; find the
        # trigger family and take the following selector as the boundary
        for end in range(len(tokens), 0, -1):
            clause = tokens[:end]
            if self._parse_trigger(clause) is not None:
                return clause, tokens[end:]
        return None, []

    def _parse_trigger(self, tokens: list[Token]) -> tuple[str, Selector] | None:
        cur = _Cursor(tokens)
        w = cur.peek()
        if w in ("a", "the") and cur.peek(1) in ("person", "user", "visitor"):
            cur.take()
        if cur.peek() in TRIGGER_SUBJECTS:
            cur.take()
        else:
            return None
        family = None
        for pattern, fam in self._TRIGGER_FAMILIES:
            if cur.match(*pattern):
                family = fam
                break
        if family is None:
            return None
        sel = self.grammar.parse_selector(cur)
        if sel is None or not cur.done():
            return None
        return family, sel

    def _build_interact(self, trigger_tokens: list[Token], action_tokens: list[Token]) -> list[dict] | None:
        trigger = self._parse_trigger(trigger_tokens)
        if trigger is None:
            return None
        family, target = trigger
        enter, exit_, enter_desc, exit_desc = self._parse_trigger_action(action_tokens, target)
        if enter is None:
            return None

        if target.name == "__anaphor__":
            # "make the lamp turn on when I touch it": the action clause names
            # the object the trigger should watch
            promoted = None
            for spec in enter + (exit_ or []):
                if isinstance(spec.get("selector"), Selector):
                    promoted = spec["selector"]
                    break
            if promoted is None:
                return None
            target = promoted
            for spec in enter + (exit_ or []):
                if spec.get("selector") is promoted:
                    spec["selector"] = "self"

        target_desc = target.describe()
        tasks = [{
            "op": "interact", "type": "Interact", "family": family, "target": target,
            "enter": enter, "exit": exit_,
            "description": f"Create a {family} trigger on the {target_desc}.",
        }]
        tasks.append({"op": "trigger_effect", "type": "Edit",
                      "description": f"{enter_desc} when the {family} trigger starts."})
        if exit_:
            tasks.append({"op": "trigger_effect", "type": "Edit",
                          "description": f"{exit_desc} when the {family} trigger ends."})
        return tasks

    def _parse_trigger_action(self, tokens: list[Token], target: Selector):
        """Action clause of an interaction: (enter, exit, enter_desc, exit_desc)."""
        cur = _Cursor(tokens)

        def is_target_ref(sel: Selector | None) -> bool:
            return sel is None or sel.name == "__anaphor__" or \
                (sel.kind is not None and sel.kind == target.kind)

        def subject_of(sel: Selector | None):
            return "self" if is_target_ref(sel) else sel

        explicit: Selector | None = None
        if cur.peek() == "make":
            cur.take()
            explicit = self.grammar.parse_selector(
                cur, stop_words={"turn", "levitate", "float", "spin", "open", "move", "jump", "go"})

        # "turn it on" / "turn on the red lamp" / "<sel> turns on"
        if cur.peek() in ("turn", "turns", "switch", "switches"):
            cur.take()
            flag = None
            sel = explicit
            if cur.peek() in ("on", "off"):
                flag = cur.take().word == "on"
                if sel is None:
                    sel = self.grammar.parse_selector(cur)
            else:
                parsed = self.grammar.parse_selector(cur, stop_words={"on", "off"})
                sel = sel or parsed
                if cur.peek() in ("on", "off"):
                    flag = cur.take().word == "on"
            if flag is None:
                return None, None, "", ""
            subject = subject_of(sel)
            enter = [{"kind": "set", "selector": subject, "prop": "illuminated", "flag": flag}]
            exit_ = [{"kind": "set", "selector": subject, "prop": "illuminated", "flag": not flag}]
            on_desc = "Turn the light on" if flag else "Turn the light off"
            off_desc = "Turn the light off" if flag else "Turn the light back on"
            return enter, exit_, on_desc, off_desc

        words = [t.word for t in cur.rest()]

        if {"levitates", "levitate", "floats", "float"} & set(words):
            sel = explicit
            if words and words[0] not in ("levitate", "float", "it", "levitates", "floats"):
                sub = _Cursor([t for t in cur.rest()])
                sel = self.grammar.parse_selector(
                    sub, stop_words={"levitates", "floats", "levitate", "float"}) or explicit
            subject = subject_of(sel)
            enter = [{"kind": "set", "selector": subject, "prop": "levitated", "flag": True}]
            exit_ = [{"kind": "set", "selector": subject, "prop": "levitated", "flag": False}]
            return enter, exit_, "Levitate it", "Set it back down"

        if ("move" in words or "moves" in words) and "back" in words:
            enter = [{"kind": "move", "selector": "self", "placement": {"tag": "away_from_user"}}]
            return enter, None, "Move it away from the approaching person", ""

        if {"spin", "spins", "rotate", "rotates"} & set(words):
            enter = [{"kind": "set_rotation", "selector": "self", "mode": "spin", "deg": 180.0}]
            return enter, None, "Spin it around", ""

        if {"opens", "open"} & set(words):
            enter = [{"kind": "set_rotation", "selector": "self", "mode": "yaw", "deg": 90.0}]
            return enter, None, "Swing it open on its hinges", ""

        # "<selector> jumps to <placement>" / "move it to <placement>"
        rest = cur.rest()
        words = [t.word for t in rest]
        for verb in ("jumps", "jump", "moves", "move", "goes", "go"):
            if verb in words:
                pos = words.index(verb)
                subj_tokens = rest[:pos]
                subj = explicit
                if subj_tokens:
                    sub_cur = _Cursor(subj_tokens)
                    subj = self.grammar.parse_selector(sub_cur) or explicit
                place_cur = _Cursor(rest[pos + 1:])
                landing = place_cur.peek() in ("to", "onto")
                if landing:
                    place_cur.take()
                placement = self.grammar.parse_placement(place_cur)
                if placement is None and landing:
                    # "jumps to the coffee table": a bare referent means landing on it
                    ref = self.grammar.parse_selector(place_cur)
                    if ref is not None:
                        placement = {"tag": "on_top_of", "ref": ref}
                if placement is None:
                    break
                enter = [{"kind": "move", "selector": subject_of(subj), "placement": placement}]
                return enter, None, "Move it to the new spot", ""
        return None, None, "", ""

    # EDIT ------------------------------------------------------------------------

    def _edit(self, cur: _Cursor, last_created) -> list[dict] | None:
        w = cur.peek()
        if w is None:
            return None

        # turn on/off
        if w in ("turn", "switch"):
            save = cur.i
            cur.take()
            flag = None
            if cur.peek() in ("on", "off"):
                flag = cur.take().word == "on"
                sel = self.grammar.parse_selector(cur)
            else:
                sel = self.grammar.parse_selector(cur, stop_words={"on", "off"})
                if cur.peek() in ("on", "off"):
                    flag = cur.take().word == "on"
            if flag is not None and sel is not None:
                verb = "on" if flag else "off"
                return [{
                    "op": "set", "type": "Edit", "selector": sel, "prop": "illuminated",
                    "value": {"tag": "bool", "flag": flag},
                    "description": f"Turn the {sel.describe()} {verb}.",
                }]
            cur.i = save
            return None

        if w in ("levitate", "float"):
            cur.take()
            sel = self.grammar.parse_selector(cur)
            if sel is None:
                return None
            return [{
                "op": "set", "type": "Edit", "selector": sel, "prop": "levitated",
                "value": {"tag": "bool", "flag": True},
                "description": f"Levitate the {sel.describe()}.",
            }]

        if w == "illuminate":
            cur.take()
            sel = self.grammar.parse_selector(cur)
            if sel is None:
                return None
            return [{
                "op": "set", "type": "Edit", "selector": sel, "prop": "illuminated",
                "value": {"tag": "bool", "flag": True},
                "description": f"Turn the {sel.describe()} on.",
            }]

        if w in ("open", "close"):
            cur.take()
            sel = self.grammar.parse_selector(cur)
            if sel is None:
                return None
            deg = 90.0 if w == "open" else 0.0
            how = "open" if w == "open" else "closed"
            return [{
                "op": "set", "type": "Edit", "selector": sel, "prop": "rotation",
                "value": {"tag": "yaw", "deg": deg},
                "description": f"Swing the {sel.describe()} {how} on its hinges.",
            }]

        if w == "rotate" or w == "spin":
            cur.take()
            sel = self.grammar.parse_selector(cur, stop_words={"by", "to", "around"})
            if sel is None:
                return None
            mode = "spin"
            if cur.peek() == "to":
                mode = "yaw"
                cur.take()
            elif cur.peek() == "by":
                cur.take()
            deg = 180.0
            w2 = cur.peek()
            if w2 == "around":
                cur.take()
            elif w2 is not None:
                try:
                    deg = float(w2)
                except ValueError:
                    pass
                else:
                    cur.take()
                    if cur.peek() in ("degrees", "degree"):
                        cur.take()
            verb = "Rotate" if mode == "yaw" else "Spin"
            return [{
                "op": "set", "type": "Edit", "selector": sel, "prop": "rotation",
                "value": {"tag": mode, "deg": deg},
                "description": f"{verb} the {sel.describe()} {'to' if mode == 'yaw' else 'by'} {deg:g} degrees.",
            }]

        if w == "align":
            cur.take()
            sel = self.grammar.parse_selector(cur, stop_words={"with"})
            if sel is None or not cur.match("with"):
                return None
            ref = self.grammar.parse_selector(cur)
            if ref is None:
                return None
            return [{
                "op": "move", "type": "Edit", "selector": sel,
                "placement": {"tag": "align_y", "ref": ref},
                "description": f"Align the {sel.describe()} with the {ref.describe()}.",
            }]

        if (w == "change" and cur.peek(1) == "the" and cur.peek(2) in ("color", "colour")) or w == "paint":
            if w == "paint":
                cur.take()
            else:
                cur.take(); cur.take(); cur.take()
                if cur.peek() == "of":
                    cur.take()
            sel = self.grammar.parse_selector(cur, stop_words={"to"})
            if sel is None:
                return None
            if cur.peek() == "to":
                cur.take()
            color = cur.take().word if cur.peek() in PALETTE else None
            if color is None:
                return None
            return [self._color_action(sel, color)]

        # make <sel> <adjective or value>
        if w in ("make", "scale", "resize", "elongate", "shrink", "grow"):
            save = cur.i
            verb = cur.take().word
            sel = self.grammar.parse_selector(
                cur, stop_words={"bigger", "smaller", "wider", "narrower", "taller",
                                 "shorter", "twice", "times", "squat", "float", "levitate"})
            if sel is not None and not getattr(sel, "_indefinite", False):
                action = self._parse_make_tail(cur, sel, verb)
                if action is not None:
                    return [action]
            cur.i = save
            return None

        # move-style edits with a definite selector
        if w in MOVE_VERBS:
            save = cur.i
            cur.take()
            sel = self.grammar.parse_selector(cur)
            if sel is None or getattr(sel, "_indefinite", False):
                cur.i = save
                return None
            placement = self.grammar.parse_placement(cur)
            if placement is None or placement.get("tag") == "floor":
                if placement is None:
                    cur.i = save
                    return None
            if placement.get("tag") == "floor":
                return [{
                    "op": "set", "type": "Edit", "selector": sel, "prop": "levitated",
                    "value": {"tag": "bool", "flag": False},
                    "description": f"Set the {sel.describe()} down on the floor.",
                }]
            where = self._placement_phrase(placement)
            return [self._move_action(sel, placement, f"Move the {sel.describe()} {where}.")]
        return None

    def _parse_make_tail(self, cur: _Cursor, sel: Selector, verb: str) -> dict | None:
        factor = None
        words = [t.word for t in cur.rest()]
        if cur.peek() == "twice":
            cur.take()
            factor = 2.0
            if cur.peek() == "as":
                cur.take()
        else:
            count = self.grammar.parse_count(cur)
            if count is not None and cur.peek() == "times":
                cur.take()
                factor = float(count)

        w = cur.peek()
        if verb == "elongate":
            return self._size_action(sel, "scale_w", 1.5)
        if verb == "shrink":
            return self._size_action(sel, "scale", 1 / 1.5)
        if verb == "grow":
            return self._size_action(sel, "scale", factor or 1.5)
        if w in ("bigger", "larger", "big", "large"):
            cur.take()
            return self._size_action(sel, "scale", factor or 1.5)
        if w in ("smaller", "small", "tinier"):
            cur.take()
            return self._size_action(sel, "scale", 1.0 / (factor or 1.5))
        if w == "wider":
            cur.take()
            return self._size_action(sel, "scale_w", factor or 1.5)
        if w == "narrower":
            cur.take()
            return self._size_action(sel, "scale_w", 1.0 / (factor or 1.5))
        if w == "taller":
            cur.take()
            return self._size_action(sel, "scale_h", factor or 1.5)
        if w == "shorter":
            cur.take()
            return self._size_action(sel, "scale_h", 1.0 / (factor or 1.5))
        if w == "squat":
            cur.take()
            return self._size_action(sel, "scale_h", 0.6)
        if w in SIZE_ADJS:
            cur.take()
            factor = 0.7 if SIZE_ADJS[w] == "small" else 1.4
            return self._size_action(sel, "scale", factor)
        if w in PALETTE:
            return self._color_action(sel, cur.take().word)
        if w == "float" or w == "levitate":
            cur.take()
            return {
                "op": "set", "type": "Edit", "selector": sel, "prop": "levitated",
                "value": {"tag": "bool", "flag": True},
                "description": f"Levitate the {sel.describe()}.",
            }
        return None

    def _size_action(self, sel: Selector, tag: str, factor: float) -> dict:
        adj = {
            "scale": "bigger" if factor > 1 else "smaller",
            "scale_w": "wider" if factor > 1 else "narrower",
            "scale_h": "taller" if factor > 1 else "shorter",
            "scale_d": "deeper" if factor > 1 else "shallower",
        }[tag]
        noun = sel.describe()
        return {
            "op": "set", "type": "Edit", "selector": sel, "prop": "size",
            "value": {"tag": tag, "factor": factor},
            "description": f"Scale the {noun} {factor:g}x {adj}."
            if factor > 1 else f"Scale the {noun} {adj} by 1/{1 / factor:g}.",
        }

    def _color_action(self, sel: Selector, color: str) -> dict:
        return {
            "op": "set", "type": "Edit", "selector": sel, "prop": "color",
            "value": {"tag": "color", "term": color},
            "description": f"Change the color of the {sel.describe()} to {color}.",
        }

    # CREATE ------------------------------------------------------------------------

    def _create(self, cur: _Cursor, last_created) -> list[dict] | None:
        w = cur.peek()
        verb = None
        if w in CREATE_VERBS:
            verb = cur.take().word
            if verb == "give" and cur.peek() == "me":
                cur.take()
            if cur.peek() == "up":  # "set up" belongs to arrange
                return None
        elif w is not None and (w.isdigit() or w in NUMBER_WORDS):
            verb = "create"
        else:
            return None

        # "a grid of X, N by M" / "a N by M grid of X"
        grid = self._parse_grid(cur)
        if grid is not None:
            return [grid]

        count = 1
        if cur.peek() in ("a", "an", "one"):
            cur.take()
        else:
            n = self.grammar.parse_count(cur)
            if n is not None:
                count = n

        # "row of N chairs"
        if cur.peek() == "row" and cur.peek(1) == "of":
            cur.take(); cur.take()
            n = self.grammar.parse_count(cur) or 3
            sel = self.grammar.parse_selector(cur)
            if sel is None or sel.kind is None:
                raise _Unparseable("I don't know that object type")
            wall = None
            placement = self.grammar.parse_placement(cur)
            if placement and placement.get("tag") in ("against_wall", "on_wall"):
                wall = placement["wall"] if self.catalog.get(sel.kind).wall_mountable else None
            return [{
                "op": "grid", "type": "Create", "kind": sel.kind, "rows": 1, "cols": n,
                "wall": wall,
                "description": f"Create a row of {n} {sel.kind}s.",
            }]

        # "three kinds of animals"
        if cur.peek() in ("kinds", "kind", "types", "type") and cur.peek(1) == "of":
            cur.take(); cur.take()
            noun = cur.peek()
            category = self.grammar.category_of(noun or "")
            if category is None:
                raise _Unparseable(f"I don't know the category {noun!r}")
            cur.take()
            kinds = self.catalog.of_category(category)[:count]
            actions = []
            for kind in kinds:
                actions.append({
                    "op": "create", "type": "Create", "kind": kind, "count": 1,
                    "placement": None, "overrides": {},
                    "description": f"Create a {kind} in front of the user.",
                })
            return actions

        overrides: dict = {}
        size_adj = None
        while True:
            w = cur.peek()
            if w in ("short", "tall", "wide", "squat"):
                size_adj = cur.take().word
                continue
            if w in SIZE_ADJS:
                size_adj = "small" if SIZE_ADJS[cur.take().word] == "small" else "big"
                continue
            if w in PALETTE and (cur.peek(1), ) and (w, cur.peek(1)) not in BIGRAMS:
                overrides["color"] = cur.take().word
                continue
            if w in ("rectangular", "rectangle", "square", "round", "wooden", "plastic", "color", "colored"):
                cur.take()
                continue
            break

        kind = self._parse_kind(cur)
        if kind is None:
            raise _Unparseable("I don't know that object type")
        if size_adj is not None:
            overrides["size_adj"] = size_adj

        placement = self.grammar.parse_placement(cur)
        if placement is not None and placement.get("tag") == "floor":
            placement = None

        actions: list[dict] = []
        # an indefinite placement referent is created first ("a lamp on a desk")
        if placement is not None and isinstance(placement.get("ref"), Selector) and \
                getattr(placement["ref"], "_indefinite", False):
            ref_sel = placement["ref"]
            actions.append({
                "op": "create", "type": "Create", "kind": ref_sel.kind, "count": 1,
                "placement": None, "overrides": {},
                "description": f"Create a {ref_sel.kind} in front of the user.",
            })
            placement = dict(placement)
            placement["ref"] = {"created_index": len(actions) - 1}

        for _ in range(count):
            actions.append({
                "op": "create", "type": "Create", "kind": kind, "count": 1,
                "placement": placement, "overrides": dict(overrides),
                "description": self._create_description(kind, overrides, placement),
            })

        # "with a <kind> on it" / "and a <kind>"
        while True:
            if cur.match("with",):
                if cur.peek() in ("a", "an"):
                    cur.take()
                extra_kind = self._parse_kind(cur)
                if extra_kind is None:
                    raise _Unparseable("I don't know that object type")
                extra_placement = self.grammar.parse_placement(cur)
                host = len(actions) - 1
                if extra_placement is None or extra_placement.get("tag") in ("on_top_of", "floor"):
                    extra_placement = {"tag": "on_top_of", "ref": {"created_index": host}}
                actions.append({
                    "op": "create", "type": "Create", "kind": extra_kind, "count": 1,
                    "placement": extra_placement, "overrides": {},
                    "description": f"Create a {extra_kind} on top of the {kind}.",
                })
                continue
            if cur.match("and",):
                if cur.peek() in ("a", "an"):
                    cur.take()
                extra_kind = self._parse_kind(cur)
                if extra_kind is None:
                    raise _Unparseable("I don't know that object type")
                extra_placement = self.grammar.parse_placement(cur)
                actions.append({
                    "op": "create", "type": "Create", "kind": extra_kind, "count": 1,
                    "placement": extra_placement, "overrides": {},
                    "description": f"Create a {extra_kind}.",
                })
                continue
            break
        return actions

    def _parse_kind(self, cur: _Cursor) -> str | None:
        w = cur.peek()
        if w is None:
            return None
        nxt = cur.peek(1)
        if nxt is not None and (w, nxt) in BIGRAMS:
            cur.take(); cur.take()
            return BIGRAMS[(w, nxt)]
        kind = self.grammar.kind_of(w)
        if kind is not None:
            cur.take()
            return kind
        return None

    def _parse_grid(self, cur: _Cursor) -> dict | None:
        save = cur.i
        rows = cols = None
        kind = None
        if cur.peek() in ("a", "an"):
            cur.take()
        n1 = self.grammar.parse_count(cur)
        if n1 is not None and cur.peek() == "by":
            cur.take()
            n2 = self.grammar.parse_count(cur)
            if n2 is not None and cur.peek() == "grid" and cur.peek(1) == "of":
                cur.take(); cur.take()
                kind = self._parse_kind(cur)
                rows, cols = n1, n2
        elif cur.peek() == "grid" and cur.peek(1) == "of":
            cur.take(); cur.take()
            kind = self._parse_kind(cur)
            if kind is not None:
                n1 = self.grammar.parse_count(cur)
                if n1 is not None and cur.peek() == "by":
                    cur.take()
                    n2 = self.grammar.parse_count(cur)
                    rows, cols = n1, n2
        if kind is None or rows is None or cols is None:
            cur.i = save
            return None
        wall = None
        placement = self.grammar.parse_placement(cur)
        if placement and placement.get("tag") in ("against_wall", "on_wall"):
            if self.catalog.get(kind).wall_mountable:
                wall = placement["wall"]
        where = f" on the {wall} wall" if wall else ""
        return {
            "op": "grid", "type": "Create", "kind": kind, "rows": rows, "cols": cols,
            "wall": wall, "description": f"Create a {rows} by {cols} grid of {kind}s{where}.",
        }

    def _create_description(self, kind: str, overrides: dict, placement: dict | None) -> str:
        bits = [overrides.get("color"), kind]
        noun = " ".join(b for b in bits if b)
        where = self._placement_phrase(placement) if placement else "in front of the user"
        return f"Create a {noun} {where}."

    def _placement_phrase(self, placement: dict | None) -> str:
        if placement is None:
            return "in front of the user"
        tag = placement.get("tag")
        ref = placement.get("ref")
        ref_desc = ref.describe() if isinstance(ref, Selector) else "the new object"
        return {
            "deictic": "at the indicated spot",
            "in_front_of_user": "in front of the user",
            "behind_user": "behind the user",
            "left_of_user": "to the user's left",
            "right_of_user": "to the user's right",
            "away_from_user": "away from the user",
            "in_front_of": f"in front of the {ref_desc}",
            "behind": f"behind the {ref_desc}",
            "next_to": f"next to the {ref_desc}",
            "near": f"near the {ref_desc}",
            "on_top_of": f"on top of the {ref_desc}",
            "against_wall": f"against the {placement.get('wall')} wall",
            "on_wall": f"on the {placement.get('wall')} wall",
            "center_of_room": "in the center of the room",
            "corner": f"in the {placement.get('wall')}-{placement.get('wall2')} corner",
            "floor": "on the floor",
        }.get(tag, "in the room")


def _remap_created_refs(action: dict, base: int) -> None:
    """Rebase sentence-local created_index placement refs to global task indices."""

    def fix(placement):
        if isinstance(placement, dict):
            ref = placement.get("ref")
            if isinstance(ref, dict) and "created_index" in ref:
                placement["ref"] = {"created_task": base + ref["created_index"]}

    fix(action.get("placement"))
    for spec in (action.get("enter") or []) + (action.get("exit") or []):
        fix(spec.get("placement"))


class _Unparseable(EngineError):
    code = "Unparseable"
