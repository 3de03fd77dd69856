import gzip
import pathlib


class SolveLog:
    header = "label\tstatus\tobjective\titerations\tseconds\tvariables\trows\tnonzeros\tworst_row\tworst_violation\n"

    def __init__(self, path, compression=None, full_logs=True):
        '''
        Run log for solves: one tab-separated entry per solve.

        path:
            path of the log, usually <run dir>/solve_log.tsv
        compression:
            None for plain text or 'gzip'
        full_logs:
            if True, also record the worst row violation of every solve,
            otherwise those two columns stay empty
        '''
        self.path = pathlib.Path(path)
        self.full_logs = full_logs
        if compression == 'gzip':
            self.handle = gzip.open(self.path, "wt", compresslevel=6)
        elif compression is None:
            self.handle = open(self.path, "wt")
        else:
            raise NotImplementedError(f"Unknown compression {compression!r} for solve log {self.path}")
        self.handle.write(SolveLog.header)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_value, tb):
        self.close()

    def close(self):
        if not self.handle.closed:
            self.handle.close()

    def write(self, label, lp, result):
        '''
        Append the entry of a finished solve
        '''
        worst_row, worst_violation = "", ""
        if self.full_logs and result.primal is not None:
            violation, name = lp.worst_row(result.primal)
            worst_row, worst_violation = name or "", f"{violation:.3g}"
        self.handle.write(
            f"{label}\t{result.status.value}\t{result.objective!r}\t{result.iterations}\t{result.seconds:.3f}\t"
            f"{lp.num_variables}\t{lp.num_rows}\t{lp.num_nonzeros}\t{worst_row}\t{worst_violation}\n"
        )
        self.handle.flush()
