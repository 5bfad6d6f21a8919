import pytest

from sqlgate.sql.ast import Column, ColumnType, Schema


@pytest.fixture
def patent_schema():
    return Schema(
        {
            "google_full": [
                Column("patent_id", ColumnType.TEXT),
                Column("assignee", ColumnType.TEXT),
                Column("cpc", ColumnType.TEXT),
                Column("grant_date", ColumnType.DATE),
                Column("title", ColumnType.TEXT),
            ]
        }
    )


@pytest.fixture
def tiny_schema():
    return Schema(
        {
            "t": [
                Column("id", ColumnType.TEXT),
                Column("assignee", ColumnType.TEXT),
                Column("cpc", ColumnType.TEXT),
                Column("n", ColumnType.INT),
            ]
        }
    )
