"""Four-part prompt composition for CAD program generation.

A prompt is prefix + design description + design context + postfix,
optionally followed by a reference-surface script. Two reduced modes
exist for comparison runs: one drops the context and the script
entirely, the other swaps the context for a one-sentence shape hint and
drops the script.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

from cadaug.errors import EmptyDescription, MissingReference

MODE_FULL = "full"
MODE_MINUS_RT = "minus-rt"
MODE_MINUS_R = "minus-r"
MODES = (MODE_FULL, MODE_MINUS_RT, MODE_MINUS_R)

REPAIR_PREAMBLE = ("The previous program failed. Fix the errors and output "
                   "the complete corrected program.")
DEFAULT_ERROR_BUDGET = 4096


@dataclass(frozen=True)
class CategoryConfig:
    """Per-design-category prompt texts, parameterized by the part noun."""

    name: str
    noun: str
    prefix_template: str
    context_template: str
    postfix: str
    shape_hint_template: str

    def prefix(self) -> str:
        return self.prefix_template.format(noun=self.noun)

    def context(self) -> str:
        return self.context_template.format(noun=self.noun)

    def shape_hint(self) -> str:
        return self.shape_hint_template.format(noun=self.noun)


BRACKET = CategoryConfig(
    name="bracket",
    noun="bracket",
    prefix_template=("Use Python CadQuery library to write a CAD program of "
                     "a {noun} that is described as follows."),
    context_template=("The shapes of the {noun} look smooth. The {noun} "
                      "should conform to the curvature of the reference "
                      "surface in the CAD program below. After the {noun} is "
                      "created, the reference surface should be removed."),
    postfix=("Make sure the generated CAD model is watertight solid. Please "
             "export the generated CAD model to output.stl file and "
             "output.step file. Please do not visualize it. Here is the "
             "document of CadQuery for your reference "
             "(https://cadquery.readthedocs.io/en/latest/index.html). "
             "Do not output explanation."),
    shape_hint_template="The shapes of the {noun} look smooth and organic.",
)


def category_from_mapping(data: Mapping[str, str]) -> CategoryConfig:
    """Build a category from a config-file section; bracket texts are the
    defaults for any field not given."""
    return CategoryConfig(
        name=data.get("name", data.get("noun", "part")),
        noun=data.get("noun", "part"),
        prefix_template=data.get("prefix_template", BRACKET.prefix_template),
        context_template=data.get("context_template", BRACKET.context_template),
        postfix=data.get("postfix", BRACKET.postfix),
        shape_hint_template=data.get("shape_hint_template",
                                     BRACKET.shape_hint_template),
    )


@dataclass(frozen=True)
class PromptBundle:
    mode: str
    prefix: str
    description: str
    context: str        # empty in minus-rt; replaced sentence in minus-r
    postfix: str
    reference_script: str | None
    rendered: str


def compose(mode: str, category: CategoryConfig, description: str,
            reference_script: str | None = None) -> PromptBundle:
    """Assemble the prompt for one generation attempt.

    Raises EmptyDescription, MissingReference (full mode needs a script),
    or ValueError for an unknown mode.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; valid: {', '.join(MODES)}")
    if not description or not description.strip():
        raise EmptyDescription("design description must be non-empty")

    prefix = category.prefix()
    postfix = category.postfix
    script: str | None = None
    if mode == MODE_FULL:
        if not reference_script:
            raise MissingReference("full mode requires a reference script")
        context = category.context()
        script = reference_script
    elif mode == MODE_MINUS_RT:
        context = ""
    else:  # minus-r: context swapped for the shape hint, script dropped
        context = category.shape_hint()

    parts = [prefix, description, context, postfix]
    if script is not None:
        parts.append(script)
    rendered = "\n".join(p for p in parts if p)
    return PromptBundle(mode, prefix, description, context, postfix,
                        script, rendered)


def truncate_tail(text: str, budget: int) -> str:
    """Last `budget` bytes of `text` (UTF-8 safe); tracebacks end with the
    cause, so the tail is the useful part."""
    raw = text.encode("utf-8")
    if len(raw) <= budget:
        return text
    return raw[-budget:].decode("utf-8", errors="ignore")


def repair_prompt(bundle: PromptBundle, prior_program: str,
                  error_report: str,
                  budget: int = DEFAULT_ERROR_BUDGET) -> PromptBundle:
    """Extend the prompt with the failed program and its error text.

    The four base parts are untouched; only `rendered` grows, so repeated
    repairs stay bounded by base length + budget per iteration.
    """
    tail = truncate_tail(error_report, budget)
    rendered = "\n".join([bundle.rendered, REPAIR_PREAMBLE,
                          prior_program, tail])
    return replace(bundle, rendered=rendered)
