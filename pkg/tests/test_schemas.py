from __future__ import annotations

import jsonschema
import pytest

from pq5g.core5g import default_topology
from pq5g.reports import SCHEMAS, load_schema


@pytest.mark.parametrize("name", SCHEMAS)
def test_schemas_are_valid_draft_2020_12(name):
    schema = load_schema(name)
    jsonschema.Draft202012Validator.check_schema(schema)
    assert schema["$id"].endswith(f"{name}.v1.json") or "title" in schema


@pytest.mark.parametrize("dn", [False, True])
def test_topology_documents_validate(dn):
    jsonschema.validate(default_topology(dn).to_dict(), load_schema("topology"))


def test_schema_rejects_wrong_id():
    doc = default_topology().to_dict()
    doc["schema"] = "pq5g.topology/v2"
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(doc, load_schema("topology"))


def test_unknown_schema_name():
    with pytest.raises(KeyError):
        load_schema("nope")
