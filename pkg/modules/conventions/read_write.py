import json
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from modules.conventions.variables import digits


class Write:
    @staticmethod
    def __header_lines(header: Mapping[str, str]) -> str:
        return '\n'.join(f'{key} = {value}' for key, value in header.items())

    @staticmethod
    def csv(file_path: str | Path, data: List[Dict], header: Optional[Mapping[str, str]] = None):
        """
        Write rows to a comma separated file with every float at round-trip precision.

        :param file_path: The path to the CSV file to be written.
        :param data: A list of dictionaries, where each dictionary represents a row in the CSV file.
        :param header: Optional key/value pairs written first as '#' comment lines.
        """
        if not data:
            raise ValueError("No data provided to write.")

        with open(file_path, mode='w', newline='', encoding='utf-8') as file:
            if header:
                file.write(''.join(f'# {line}\n' for line in Write.__header_lines(header).splitlines()))
            pd.DataFrame(data).to_csv(file, index=False, float_format=digits, na_rep='')

    @staticmethod
    def table(file_path: str | Path, columns: Sequence[np.ndarray], names: Sequence[str],
              header: Optional[Mapping[str, str]] = None):
        """
        Write equally long numeric columns as whitespace separated text.

        :param columns: One array per column.
        :param names: Column names, written as the last '#' line above the data.
        :param header: Optional key/value pairs written as '#' lines above the column names.
        """
        lines = Write.__header_lines(header) + '\n' if header else ''
        np.savetxt(file_path, np.column_stack(columns), fmt=digits, header=lines + ' '.join(names),
                   comments='# ', encoding='utf-8')

    @staticmethod
    def json(file_path: str | Path, data: Dict | List[Dict]):
        """
        Write the provided data to a JSON file, converting paths and numpy scalars to plain values.
        """
        if not data:
            raise ValueError("No data provided to write.")

        def default_serializer(obj):
            if isinstance(obj, Path):
                return str(obj)
            if isinstance(obj, np.generic):
                return obj.item()
            if isinstance(obj, np.ndarray):
                return obj.tolist()
            raise TypeError(f"Type {type(obj)} not serializable")

        with open(file_path, 'w', encoding='utf-8') as file:
            json.dump(data, file, indent=4, default=default_serializer)

    @staticmethod
    def text(file_path: str | Path, lines: Sequence[str]):
        with open(file_path, 'w', encoding='utf-8') as file:
            file.write('\n'.join(lines) + '\n')

    @staticmethod
    def __fix_column_widths(writer: pd.ExcelWriter, df: pd.DataFrame, sheet_name: str):
        worksheet = writer.sheets[sheet_name]
        for i, col in enumerate(df.columns):
            width = max(df[col].apply(lambda x: len(str(x))).max(), len(str(col)))
            worksheet.set_column(i, i, width)

    @staticmethod
    def __excel(writer: pd.ExcelWriter, data: List[Dict], sheet_name: str, fix_column_width: bool = True):
        df = pd.DataFrame(data)
        df.to_excel(writer, sheet_name=sheet_name, index=False)
        if fix_column_width:
            Write.__fix_column_widths(writer, df, sheet_name)

    @staticmethod
    def excel_multiple_sheets(file_path: str | Path, data: Dict[str, List[Dict]], fix_column_width: bool = True):
        """
        :param file_path: path to the excel file
        :param data: The key in the dict is sheet_name
        """
        with pd.ExcelWriter(file_path, engine='xlsxwriter') as writer:
            for sheet_name, data_ in data.items():
                Write.__excel(writer=writer,
                              data=data_,
                              sheet_name=sheet_name,
                              fix_column_width=fix_column_width)


class Read:

    @staticmethod
    def csv(path: str | Path) -> pd.DataFrame:
        return pd.read_csv(path, comment='#')

    @staticmethod
    def table(path: str | Path) -> np.ndarray:
        return np.loadtxt(path, comments='#', ndmin=2)
