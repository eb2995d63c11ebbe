from functools import lru_cache
from typing import Any

from jsonpath_ng.jsonpath import JSONPath
from jsonpath_ng.exceptions import JsonPathLexerError, JsonPathParserError
from jsonpath_ng.ext import parse


@lru_cache(maxsize=256)
def compile_path(path: str) -> JSONPath:
    """Разбирает JSONPath один раз; ошибка синтаксиса превращается в ValueError."""
    try:
        return parse(path)
    except (JsonPathLexerError, JsonPathParserError) as e:
        raise ValueError(f"Invalid JSONPath {path!r}: {e}") from None


def eval_path(doc: dict[str, Any], path: str) -> Any:
    """
    Выполняет JSONPath запрос к документу (summary, manifest, checkpoint header).
    Возвращает единственное значение, список значений или [] если ничего не найдено.
    """
    if not path:
        return doc

    matches = [m.value for m in compile_path(path).find(doc)]

    if len(matches) == 1:
        return matches[0]
    return matches
