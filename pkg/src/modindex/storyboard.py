"""Movement Oriented Design storyboards.

A storyboard is a tree of Begin/Middle/End story units. Each unit is
addressed by its path from the root, written ``B1,M2,E3``: the letter is
the role at that stage and the digit is the stage (the depth). A unit can
be declared without content ("un-instantiated") so that a later author can
fill it in.
"""

from __future__ import annotations

import enum
import json
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from modindex.textindex import Document

MAX_RECOMMENDED_DEPTH = 16


class StoryboardError(ValueError):
    """Raised for malformed addresses, boards and storyboard files."""


class AddressError(StoryboardError):
    pass


class UnitNotFound(StoryboardError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unit not found"


class DeepStoryWarning(UserWarning):
    pass


class Role(enum.Enum):
    BEGIN = "B"
    MIDDLE = "M"
    END = "E"

    @property
    def code(self) -> str:
        return self.value

    @classmethod
    def from_code(cls, code: str) -> "Role":
        try:
            return cls(code.upper())
        except ValueError:
            raise AddressError(f"unknown role code {code!r}") from None


ROLE_ORDER = (Role.BEGIN, Role.MIDDLE, Role.END)

# Which kind of character each type of story needs.
CHARACTER_TYPES = {
    "Humanistic": "Human Beings",
    "Animated": "Animation Beings",
    "Game": "Game Beings",
    "Education": "Knowledge elements",
    "Song": "Word, metaphors",
    "Musik": "Notes, Movements",
    # the table's ditto mark repeats the row above
    "Multisensory story": "Notes, Movements + Touch, Smell & Taste",
    "Formal Story": "Any of the above",
}


def character_type_for(story_type: str) -> str:
    """Character type a story type calls for (case-insensitive key)."""
    wanted = story_type.strip().casefold()
    if wanted == "music":
        wanted = "musik"
    for key, value in CHARACTER_TYPES.items():
        if key.casefold() == wanted:
            return value
    raise StoryboardError(f"unknown story type {story_type!r}")


def _is_known_story_type(story_type: str) -> bool:
    try:
        character_type_for(story_type)
    except StoryboardError:
        return False
    return True


@dataclass(frozen=True)
class StoryAddress:
    path: tuple[tuple[Role, int], ...]

    def __post_init__(self) -> None:
        if not self.path:
            raise AddressError("empty address")
        for i, (role, stage) in enumerate(self.path, start=1):
            if not isinstance(role, Role):
                raise AddressError(f"bad role {role!r}")
            if stage != i:
                raise AddressError(
                    f"non-consecutive stage: position {i} has stage {stage}"
                )

    @classmethod
    def root(cls, role: Role) -> "StoryAddress":
        return cls(((role, 1),))

    @property
    def depth(self) -> int:
        return len(self.path)

    @property
    def role(self) -> Role:
        return self.path[-1][0]

    @property
    def parent(self) -> "StoryAddress | None":
        if len(self.path) == 1:
            return None
        return StoryAddress(self.path[:-1])

    def child(self, role: Role) -> "StoryAddress":
        return StoryAddress(self.path + ((role, self.depth + 1),))

    def __str__(self) -> str:
        return format_address(self)


_TOKEN = re.compile(r"([A-Za-z])(\d+)")


def parse_address(text: str) -> StoryAddress:
    """Parse ``"B1, M2"`` style text; whitespace around tokens is ignored."""
    if not text or not text.strip():
        raise AddressError("empty address")
    path = []
    for raw in text.split(","):
        token = raw.strip()
        m = _TOKEN.fullmatch(token)
        if m is None:
            raise AddressError(f"malformed address token {token!r} in {text!r}")
        path.append((Role.from_code(m.group(1)), int(m.group(2))))
    return StoryAddress(tuple(path))


def format_address(addr: StoryAddress) -> str:
    return ",".join(f"{role.code}{stage}" for role, stage in addr.path)


@dataclass
class StoryUnit:
    address: StoryAddress
    narrative: str = ""
    problem: str | None = None
    instantiated: bool = False
    children: dict[Role, "StoryUnit"] = field(default_factory=dict)

    @property
    def text(self) -> str:
        if self.problem:
            return f"{self.problem} {self.narrative}".strip()
        return self.narrative

    def walk(self) -> Iterator["StoryUnit"]:
        """Pre-order traversal, children visited B, M, E."""
        yield self
        for role in ROLE_ORDER:
            child = self.children.get(role)
            if child is not None:
                yield from child.walk()


@dataclass
class Storyboard:
    main_problem: str = ""
    story_type: str = "Formal Story"
    units: dict[Role, StoryUnit] = field(default_factory=dict)

    def walk(self) -> Iterator[StoryUnit]:
        for role in ROLE_ORDER:
            unit = self.units.get(role)
            if unit is not None:
                yield from unit.walk()

    def add_root(
        self, role: Role, narrative: str = "", problem: str | None = None
    ) -> StoryAddress:
        if role in self.units:
            raise StoryboardError(f"duplicate stage-1 unit {role.code}1")
        addr = StoryAddress.root(role)
        self.units[role] = StoryUnit(
            addr, narrative, problem, instantiated=bool(narrative)
        )
        return addr


def get_unit(board: Storyboard, addr: StoryAddress | str) -> StoryUnit:
    if isinstance(addr, str):
        try:
            addr = parse_address(addr)
        except AddressError as e:
            # a string that is not even a valid address names no unit
            raise UnitNotFound(f"no unit at {addr!r} ({e})") from None
    node = None
    children = board.units
    for role, _stage in addr.path:
        node = children.get(role)
        if node is None:
            raise UnitNotFound(f"no unit at {format_address(addr)}")
        children = node.children
    assert node is not None
    return node


def expand_unit(
    board: Storyboard,
    parent: StoryAddress | str,
    role: Role,
    problem: str | None = None,
    narrative: str = "",
) -> StoryAddress:
    """Add a child story unit under *parent* and return its address."""
    parent_unit = get_unit(board, parent)
    if role in parent_unit.children:
        raise StoryboardError(
            f"{format_address(parent_unit.address)} already has a {role.name} child"
        )
    addr = parent_unit.address.child(role)
    parent_unit.children[role] = StoryUnit(
        addr, narrative, problem, instantiated=bool(narrative)
    )
    return addr


@dataclass(frozen=True)
class Violation:
    address: str
    rule: str

    def __str__(self) -> str:
        return f"{self.address}: {self.rule}"


def validate_storyboard(board: Storyboard) -> list[Violation]:
    """Check every structural invariant; violations are returned, not raised."""
    violations = []
    if not _is_known_story_type(board.story_type):
        violations.append(
            Violation("<board>", f"unknown story type {board.story_type!r}")
        )

    deepest = 0

    def check(unit: StoryUnit, key: Role, expected: StoryAddress) -> None:
        nonlocal deepest
        where = format_address(unit.address)
        if unit.address != expected:
            violations.append(
                Violation(
                    where,
                    f"stored under {key.code} at stage {expected.depth} "
                    f"but addressed {where} (expected {format_address(expected)})",
                )
            )
        if not unit.instantiated and unit.narrative:
            violations.append(Violation(where, "un-instantiated unit has narrative"))
        deepest = max(deepest, unit.address.depth)
        for child_role, child in unit.children.items():
            check(child, child_role, unit.address.child(child_role))

    for role, unit in board.units.items():
        check(unit, role, StoryAddress.root(role))

    if deepest > MAX_RECOMMENDED_DEPTH:
        warnings.warn(
            f"storyboard depth {deepest} exceeds {MAX_RECOMMENDED_DEPTH}",
            DeepStoryWarning,
            stacklevel=2,
        )
    return violations


def flatten_storyboard(board: Storyboard) -> list[Document]:
    """One document per instantiated unit, in B/M/E pre-order."""
    problems = validate_storyboard(board)
    if problems:
        raise StoryboardError(
            "invalid storyboard: " + "; ".join(str(v) for v in problems)
        )
    return [
        Document(format_address(unit.address), unit.text)
        for unit in board.walk()
        if unit.instantiated
    ]


# -- JSON ------------------------------------------------------------------


def storyboard_to_dict(board: Storyboard) -> dict:
    return {
        "main_problem": board.main_problem,
        "story_type": board.story_type,
        "units": [
            {
                "address": format_address(unit.address),
                "problem": unit.problem,
                "narrative": unit.narrative,
                "instantiated": unit.instantiated,
            }
            for unit in board.walk()
        ],
    }


def storyboard_from_dict(data: dict) -> Storyboard:
    if not isinstance(data, dict):
        raise StoryboardError("storyboard must be a JSON object")
    try:
        board = Storyboard(
            main_problem=str(data.get("main_problem", "")),
            story_type=str(data["story_type"]),
        )
        rows = data["units"]
    except KeyError as e:
        raise StoryboardError(f"storyboard missing key {e.args[0]!r}") from None
    if not isinstance(rows, list):
        raise StoryboardError("storyboard 'units' must be an array")

    units: dict[StoryAddress, StoryUnit] = {}
    for i, row in enumerate(rows):
        try:
            addr = parse_address(row["address"])
            problem = row.get("problem")
            narrative = row.get("narrative", "")
            instantiated = row.get("instantiated", bool(narrative))
        except (KeyError, TypeError, AttributeError) as e:
            raise StoryboardError(f"units[{i}]: bad unit record ({e})") from None
        except AddressError as e:
            raise StoryboardError(f"units[{i}].address: {e}") from None
        if problem is not None and not isinstance(problem, str):
            raise StoryboardError(f"units[{i}].problem must be a string or null")
        if not isinstance(narrative, str) or not isinstance(instantiated, bool):
            raise StoryboardError(f"units[{i}]: narrative/instantiated have wrong type")
        if addr in units:
            raise StoryboardError(f"units[{i}]: duplicate address {format_address(addr)}")
        units[addr] = StoryUnit(addr, narrative, problem, instantiated)

    # attach shallow-first so parents exist before children
    for addr in sorted(units, key=lambda a: a.depth):
        unit = units[addr]
        parent = addr.parent
        if parent is None:
            board.units[addr.role] = unit
        elif parent in units:
            units[parent].children[addr.role] = unit
        else:
            raise StoryboardError(
                f"unit {format_address(addr)} has no parent {format_address(parent)}"
            )
    return board


def dumps_storyboard(board: Storyboard) -> str:
    return json.dumps(storyboard_to_dict(board), indent=2, ensure_ascii=False) + "\n"


def load_storyboard(path: str | Path) -> Storyboard:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise StoryboardError(
            f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}"
        ) from None
    return storyboard_from_dict(data)


def save_storyboard(board: Storyboard, path: str | Path) -> None:
    Path(path).write_text(dumps_storyboard(board), encoding="utf-8")
