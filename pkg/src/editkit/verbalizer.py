"""Instruction bank loading, sampling, and prompt assembly."""

from __future__ import annotations

import hashlib
import json
import random
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple, Union

from .corpus import TASKS
from .errors import ValidationError
from .tokenize import SEPARATOR, SUPPORTED_LANGS

SETTINGS = ("english", "native", "random")
STYLES = ("encoder_prepend", "causal_wrap")

# Instruction joins the source with this in encoder_prepend style.
INSTRUCTION_SEP = ": "

# Every (task, lang) combination must carry this many instructions.
MIN_PER_COMBO = 14
MAX_PER_COMBO = 27

_BANK_NAME = "verbalizer_bank.jsonl"


def default_bank_path() -> Path:
    return Path(__file__).parent / "data" / _BANK_NAME


@dataclass(frozen=True)
class Instruction:
    """One bank entry: verbatim text plus where it came from."""

    text: str
    task: str
    lang: str
    index: int


@dataclass(frozen=True)
class InstructionBank:
    """Immutable (task, lang) -> instruction list mapping with provenance."""

    entries: Mapping[Tuple[str, str], Tuple[str, ...]]
    checksum: str
    source: str

    def instructions_for(self, task: str, lang: str) -> Tuple[str, ...]:
        try:
            return self.entries[(task, lang)]
        except KeyError:
            raise ValidationError(
                f"bank has no instructions for ({task}, {lang})"
            ) from None

    def languages(self, task: str) -> Tuple[str, ...]:
        return tuple(sorted(lang for (t, lang) in self.entries if t == task))

    def total(self) -> int:
        return sum(len(v) for v in self.entries.values())


def load_bank(
    path: Union[str, Path, None] = None, check: bool = True
) -> InstructionBank:
    """Load the instruction bank from JSONL.

    Each line is {"task", "lang", "instructions": [...]}. When a sidecar file
    `<name>.sha256` sits next to the bank, the bank bytes must hash to the
    recorded value. With check=True (default) the bank must also pass
    validate_bank; the error message lists every offending combination.
    """
    bank_path = Path(path) if path is not None else default_bank_path()
    try:
        data = bank_path.read_bytes()
    except OSError as exc:
        raise ValidationError(f"cannot read bank {bank_path}: {exc}") from exc
    checksum = hashlib.sha256(data).hexdigest()

    sidecar = bank_path.with_name(bank_path.name + ".sha256")
    if sidecar.exists():
        expected = sidecar.read_text(encoding="utf-8").strip()
        if expected != checksum:
            raise ValidationError(
                f"bank checksum mismatch for {bank_path}: "
                f"file hashes to {checksum}, sidecar records {expected}"
            )

    entries: Dict[Tuple[str, str], Tuple[str, ...]] = {}
    for line_no, line in enumerate(data.decode("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            task, lang = obj["task"], obj["lang"]
            instructions = obj["instructions"]
            if task not in TASKS:
                raise ValueError(f"unknown task {task!r}")
            if lang not in SUPPORTED_LANGS:
                raise ValueError(f"unknown lang {lang!r}")
            if not isinstance(instructions, list) or not instructions:
                raise ValueError("instructions must be a non-empty list")
            for text in instructions:
                if not isinstance(text, str) or not text:
                    raise ValueError("instructions must be non-empty strings")
                if SEPARATOR in text:
                    raise ValueError("instruction contains the reserved separator")
            if (task, lang) in entries:
                raise ValueError(f"duplicate combination ({task}, {lang})")
        except (KeyError, ValueError, TypeError) as exc:
            msg = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
            raise ValidationError(f"{bank_path}, line {line_no}: {msg}") from None
        entries[(task, lang)] = tuple(instructions)

    bank = InstructionBank(
        entries=entries, checksum=checksum, source=str(bank_path)
    )
    if check:
        problems = validate_bank(bank)["problems"]
        if problems:
            raise ValidationError("; ".join(problems))
    return bank


def validate_bank(bank: InstructionBank) -> dict:
    """Check combination coverage and per-combination counts.

    Returns {"counts", "total", "problems"}. The grand total is reported for
    inspection only; no particular value is asserted.
    """
    problems = []
    counts: Dict[Tuple[str, str], int] = {}
    for task in TASKS:
        for lang in SUPPORTED_LANGS:
            instrs = bank.entries.get((task, lang))
            if not instrs:
                problems.append(f"missing combination ({task}, {lang})")
                continue
            counts[(task, lang)] = len(instrs)
            if not MIN_PER_COMBO <= len(instrs) <= MAX_PER_COMBO:
                problems.append(
                    f"({task}, {lang}) has {len(instrs)} instructions, "
                    f"expected {MIN_PER_COMBO}..{MAX_PER_COMBO}"
                )
    return {
        "counts": counts,
        "total": sum(counts.values()),
        "problems": problems,
    }


def sample_instruction(
    bank: InstructionBank,
    task: str,
    text_lang: str,
    setting: str,
    rng: random.Random,
    exclude_native: bool = False,
) -> Instruction:
    """Draw one instruction under the given language setting.

    english: always from the English list. native: from the text language's
    list. random: pick a language uniformly over the bank's languages for the
    task (minus the text language iff exclude_native), then an instruction
    uniformly within that list.
    """
    key = setting.lower()
    if key not in SETTINGS:
        raise ValidationError(f"unknown setting {setting!r}, expected {SETTINGS}")
    if key == "english":
        lang = "en"
    elif key == "native":
        lang = text_lang
    else:
        choices = [
            lg
            for lg in bank.languages(task)
            if not (exclude_native and lg == text_lang)
        ]
        if not choices:
            raise ValidationError(f"no candidate languages for task {task!r}")
        lang = choices[rng.randrange(len(choices))]
    instrs = bank.instructions_for(task, lang)
    index = rng.randrange(len(instrs))
    return Instruction(text=instrs[index], task=task, lang=lang, index=index)


class PromptTemplate:
    """Named causal template over {instruction}, {input} and {response}.

    {response} must appear exactly once so the loss span is recoverable as a
    character range of the rendered prompt.
    """

    def __init__(self, name: str, body: str):
        fields = [
            f for _, f, _, _ in string.Formatter().parse(body) if f is not None
        ]
        unknown = set(fields) - {"instruction", "input", "response"}
        if unknown:
            raise ValidationError(
                f"template {name!r} uses unknown placeholders {sorted(unknown)}"
            )
        for required in ("instruction", "input"):
            if required not in fields:
                raise ValidationError(
                    f"template {name!r} is missing a required placeholder "
                    f"{{{required}}}"
                )
        if fields.count("response") != 1:
            raise ValidationError(
                f"template {name!r} must contain {{response}} exactly once"
            )
        self.name = name
        self.body = body
        self._head, _, self._tail = body.partition("{response}")

    def render(
        self, instruction: str, input: str, response: str
    ) -> Tuple[str, Tuple[int, int]]:
        head = self._head.format(instruction=instruction, input=input)
        tail = self._tail.format(instruction=instruction, input=input)
        span = (len(head), len(head) + len(response))
        return head + response + tail, span


_TEMPLATES: Dict[str, PromptTemplate] = {}


def register_template(name: str, body: str) -> PromptTemplate:
    tpl = PromptTemplate(name, body)
    _TEMPLATES[name] = tpl
    return tpl


def get_template(name: str) -> PromptTemplate:
    try:
        return _TEMPLATES[name]
    except KeyError:
        known = ", ".join(sorted(_TEMPLATES))
        raise ValidationError(
            f"unknown template {name!r}; registered: {known}"
        ) from None


register_template("plain", "{instruction}\n{input}\n{response}")
register_template(
    "alpaca",
    "Below is an instruction that describes a task, paired with an input that"
    " provides further context. Write a response that appropriately completes"
    " the request.\n\n### Instruction:\n{instruction}\n\n### Input:\n{input}"
    "\n\n### Response:\n{response}",
)


@dataclass(frozen=True)
class PromptRecord:
    """An assembled prompt. loss_span, when set, locates output in prompt."""

    prompt: str
    source: str
    output: str
    loss_span: Optional[Tuple[int, int]]
    setting: Optional[str] = None

    def __post_init__(self):
        if self.loss_span is not None:
            start, end = self.loss_span
            if self.prompt[start:end] != self.output:
                raise ValidationError(
                    "loss_span does not cover the output exactly"
                )


def assemble_prompt(
    instr: Union[Instruction, str],
    source: str,
    target: str,
    style: str = "encoder_prepend",
    template: Union[str, PromptTemplate] = "plain",
    separator: str = INSTRUCTION_SEP,
    setting: Optional[str] = None,
) -> PromptRecord:
    """Build one prompt.

    encoder_prepend joins the instruction and the source with `separator`;
    the whole target is the training output, so loss_span stays unset.
    causal_wrap renders the named template and records the character span of
    the target inside the prompt.
    """
    if not source or not target:
        raise ValidationError("source and target must be non-empty")
    text = instr.text if isinstance(instr, Instruction) else instr
    if style == "encoder_prepend":
        return PromptRecord(
            prompt=text + separator + source,
            source=source,
            output=target,
            loss_span=None,
            setting=setting,
        )
    if style == "causal_wrap":
        tpl = template if isinstance(template, PromptTemplate) else get_template(template)
        prompt, span = tpl.render(instruction=text, input=source, response=target)
        return PromptRecord(
            prompt=prompt,
            source=source,
            output=target,
            loss_span=span,
            setting=setting,
        )
    raise ValidationError(f"unknown prompt style {style!r}, expected {STYLES}")
