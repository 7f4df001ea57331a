import pytest

from eaeval.model import Argument, EvaluationSlot, SlotContext

FIXTURES = __file__.rsplit("/", 1)[0] + "/fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def make_slot(predicted, gold, doc_id="d1", role="role", text="some document",
              event_type="event"):
    """Build an evaluation slot straight from raw strings."""
    return EvaluationSlot(
        doc_id=doc_id, role=role,
        gold=tuple(Argument.from_raw(g, i) for i, g in enumerate(gold)),
        predicted=tuple(Argument.from_raw(p, i) for i, p in enumerate(predicted)),
        context=SlotContext(text=text, event_type=event_type),
    )
