from .report_writer import (
    SIMULATION_COLUMNS,
    SWEEP_COLUMNS,
    MessageFormatter,
    ReportWriter,
    ReportWriterError,
    rows_to_csv,
)

__all__ = ['SIMULATION_COLUMNS', 'SWEEP_COLUMNS', 'MessageFormatter', 'ReportWriter',
           'ReportWriterError', 'rows_to_csv']
