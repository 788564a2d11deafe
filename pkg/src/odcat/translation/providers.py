"""Translation provider client contract and the bundled mock providers."""

from __future__ import annotations

from dataclasses import dataclass, field


class ProviderError(RuntimeError):
    """Provider unreachable or errored; translation stays in started state."""


@dataclass
class SubmitResult:
    """Completed translations keyed by (text, target); missing pairs listed."""

    translations: dict[tuple[str, str], str] = field(default_factory=dict)
    missing: list[tuple[str, str]] = field(default_factory=list)


class DictionaryProvider:
    """Looks translations up in a fixed {text: {target: translation}} table."""

    def __init__(
        self,
        dictionary: dict[str, dict[str, str]],
        tag: str = "mock",
        batch_limit: int = 100,
        timeout: float = 60.0,
    ):
        self.dictionary = dictionary
        self.tag = tag
        self.batch_limit = batch_limit
        self.timeout = timeout  # applies when the table fronts a remote service

    def submit(self, texts: list[str], source: str, targets: list[str]) -> SubmitResult:
        result = SubmitResult()
        for text in texts:
            for target in targets:
                translation = self.dictionary.get(text, {}).get(target)
                if translation is None:
                    result.missing.append((text, target))
                else:
                    result.translations[(text, target)] = translation
        return result


class EchoProvider:
    """Annotates the original text instead of translating; always total."""

    def __init__(self, tag: str = "echo", batch_limit: int = 100, timeout: float = 60.0):
        self.tag = tag
        self.batch_limit = batch_limit
        self.timeout = timeout

    def submit(self, texts: list[str], source: str, targets: list[str]) -> SubmitResult:
        result = SubmitResult()
        for text in texts:
            for target in targets:
                result.translations[(text, target)] = f"[{source}→{target}] {text}"
        return result
