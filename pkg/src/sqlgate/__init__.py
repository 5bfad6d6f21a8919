"""sqlgate: a guarded natural-language-to-SQL data gateway.

Pipeline: NL request -> SQL generation (template rules or a remote
completion backend) -> syntax and security checking -> sharded
scatter-gather execution. Ships with a data augmentation engine for
building (NL, SQL) training corpora and an evaluation harness for both
text-to-SQL accuracy and checker interception quality.
"""

__version__ = "0.1.0"
